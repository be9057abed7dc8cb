use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Negative slope of the leaky ReLU used in discriminator and encoder bodies.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
    LeakyRelu(f64),
    Tanh,
    Sigmoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub input: usize,
    pub output: usize,
    pub activation: Activation,
}

/// A stack of dense layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.input == 0 || l.output == 0 {
                return Err(Error::invalid(format!("layer {i} has a zero width")));
            }
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].output != pair[1].input {
                return Err(Error::invalid(format!(
                    "layer {i} outputs {} but layer {} takes {}",
                    pair[0].output,
                    i + 1,
                    pair[1].input
                )));
            }
        }
        Ok(NetworkSpec { layers })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output
    }

    pub fn output_activation(&self) -> Activation {
        self.layers[self.layers.len() - 1].activation
    }

    fn chain(input: usize, widths: &[usize], hidden: Activation, last: Activation) -> Result<Self> {
        let mut layers = Vec::with_capacity(widths.len());
        let mut prev = input;
        for (i, &w) in widths.iter().enumerate() {
            let activation = if i + 1 == widths.len() { last } else { hidden };
            layers.push(LayerSpec {
                input: prev,
                output: w,
                activation,
            });
            prev = w;
        }
        Self::new(layers)
    }
}

/// Generator (or decoder): relu hidden layers, linear or tanh output.
pub fn build_mlp_generator(z_dim: usize, hidden: &[usize], out_dim: usize, tanh_output: bool) -> Result<NetworkSpec> {
    if hidden.is_empty() {
        return Err(Error::invalid("generator needs at least one hidden layer"));
    }
    let mut widths = hidden.to_vec();
    widths.push(out_dim);
    let last = if tanh_output {
        Activation::Tanh
    } else {
        Activation::Identity
    };
    NetworkSpec::chain(z_dim, &widths, Activation::Relu, last)
}

/// Discriminator body (or encoder): leaky-relu on every layer, so the
/// returned features are post-activation.
pub fn build_mlp_feature_extractor(in_dim: usize, hidden: &[usize], feature_dim: usize) -> Result<NetworkSpec> {
    let mut widths = hidden.to_vec();
    widths.push(feature_dim);
    let act = Activation::LeakyRelu(LEAKY_SLOPE);
    NetworkSpec::chain(in_dim, &widths, act, act)
}

/// Layer sizes for one experiment. The autoencoder mirrors the GAN:
/// encoder = discriminator body with code width `d1`, decoder = generator fed by the code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub data_dim: usize,
    pub z_dim: usize,
    pub g_hidden: Vec<usize>,
    pub d_hidden: Vec<usize>,
    pub d1: usize,
    pub d2: usize,
    pub tanh_output: bool,
}

impl Architecture {
    /// 2→[128,128]→2 generator, 2→[128,128]→128 body, 64-wide code.
    pub fn ring() -> Self {
        Architecture {
            data_dim: 2,
            z_dim: 2,
            g_hidden: vec![128, 128],
            d_hidden: vec![128, 128],
            d1: 64,
            d2: 128,
            tanh_output: false,
        }
    }

    pub fn generator(&self) -> Result<NetworkSpec> {
        build_mlp_generator(self.z_dim, &self.g_hidden, self.data_dim, self.tanh_output)
    }

    pub fn disc_body(&self) -> Result<NetworkSpec> {
        build_mlp_feature_extractor(self.data_dim, &self.d_hidden, self.d2)
    }

    pub fn encoder(&self) -> Result<NetworkSpec> {
        build_mlp_feature_extractor(self.data_dim, &self.d_hidden, self.d1)
    }

    pub fn decoder(&self) -> Result<NetworkSpec> {
        build_mlp_generator(self.d1, &self.g_hidden, self.data_dim, self.tanh_output)
    }
}
