//! Autoencoder pretraining and adversarial training loops.

pub mod autoencoder;
pub mod gan;
pub mod log;

pub use autoencoder::{pretrain_autoencoder, reconstruction_mse, AeConfig, PretrainedAutoencoder};
pub use gan::{
    head_balance_diagnostic, latent, to_points, train_gan, DStep, GanConfig, GanModel, GanTrainer, TrainSchedule,
};
pub use log::{MetricLog, MetricRow};
