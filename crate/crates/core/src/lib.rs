//! Small-scale GAN training with frozen autoencoder features in the discriminator head.

pub mod autodiff;
pub mod cli;
pub mod data;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod networks;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
pub use tensor::{DType, Scalar, Tensor};
