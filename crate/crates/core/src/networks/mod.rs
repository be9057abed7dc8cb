//! Generator, discriminator and autoencoder builders.

pub mod mlp;
pub mod rf;
pub mod spec;

pub use mlp::Mlp;
pub use rf::{
    build_autoencoder, Autoencoder, RfDiscriminator, RfOutputs, BODY_PREFIX, DECODER_PREFIX, ENCODER_PREFIX,
    GENERATOR_PREFIX, HEAD_PREFIX,
};
pub use spec::{
    build_mlp_feature_extractor, build_mlp_generator, Activation, Architecture, LayerSpec, NetworkSpec, LEAKY_SLOPE,
};
