//! Sample-quality and diversity measures.

pub mod classifier;
pub mod modes;
pub mod score;
pub mod ssim;

pub use classifier::{ClassifierConfig, ProxyClassifier};
pub use modes::{mode_coverage, ModeReport};
pub use score::proxy_classifier_score;
pub use ssim::{ms_ssim, pairwise_ms_ssim, pairwise_ms_ssim_threads, ssim, Image};
