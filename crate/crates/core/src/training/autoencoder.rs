//! Denoising autoencoder pretraining.

use rand::seq::SliceRandom;

use crate::autodiff::{Adam, AdamConfig, ExperimentRng, Graph, ParamStore};
use crate::data::corrupt;
use crate::error::{Error, Result};
use crate::networks::{build_autoencoder, Autoencoder, NetworkSpec};
use crate::tensor::{Scalar, Tensor};
use crate::training::log::MetricLog;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// std of the additive Gaussian corruption
    pub noise_std: f64,
    pub adam: AdamConfig,
}

impl Default for AeConfig {
    fn default() -> Self {
        AeConfig {
            epochs: 20,
            batch_size: 256,
            noise_std: 0.1,
            adam: AdamConfig {
                lr: 1e-3,
                beta1: 0.9,
                ..AdamConfig::default()
            },
        }
    }
}

impl AeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("autoencoder epochs and batch size must be positive"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::invalid(format!("noise_std must be >= 0, got {}", self.noise_std)));
        }
        self.adam.validate()
    }
}

/// Trained autoencoder; the encoder parameters come back frozen.
#[derive(Debug, Clone)]
pub struct PretrainedAutoencoder<T> {
    pub store: ParamStore<T>,
    pub model: Autoencoder,
    pub log: MetricLog,
    /// mean denoising reconstruction error over the last epoch
    pub final_mse: f64,
}

/// Mean squared error between `decode(encode(corrupt(x)))` and clean `x`.
pub fn reconstruction_mse<T: Scalar>(
    store: &ParamStore<T>,
    ae: &Autoencoder,
    data: &Tensor<T>,
    noise_std: f64,
    rng: &mut impl rand::Rng,
) -> Result<f64> {
    let noisy = corrupt(data, noise_std, rng)?;
    let recon = ae.reconstruct_value(store, &noisy)?;
    let se: f64 = recon
        .data()
        .iter()
        .zip(data.data())
        .map(|(a, b)| (a.f64() - b.f64()).powi(2))
        .sum();
    Ok(se / data.len() as f64)
}

/// Minimize `mean((decode(encode(x + ε)) - x)²)`, `ε ~ N(0, noise_std²)`, for a fixed number of epochs.
///
/// Streams: `init.ae` for weights, `ae.shuffle` for batch order, `ae.noise` for corruption.
pub fn pretrain_autoencoder<T: Scalar>(
    data: &Tensor<T>,
    enc_spec: NetworkSpec,
    dec_spec: NetworkSpec,
    config: &AeConfig,
    rng: &ExperimentRng,
) -> Result<PretrainedAutoencoder<T>> {
    config.validate()?;
    let (n, d) = data.dims2()?;
    if d != enc_spec.input_dim() {
        return Err(Error::shape("pretrain_autoencoder", &[n, enc_spec.input_dim()], &[n, d]));
    }
    data.check_finite("autoencoder training data")?;

    let mut store = ParamStore::new();
    let model = build_autoencoder(enc_spec, dec_spec, &mut store, &mut rng.stream("init.ae"))?;
    let ids: Vec<_> = model
        .encoder
        .param_ids()
        .into_iter()
        .chain(model.decoder.param_ids())
        .collect();
    let mut opt = Adam::new(&store, ids, config.adam);
    let mut shuffle = rng.stream("ae.shuffle");
    let mut noise = rng.stream("ae.noise");
    let mut order: Vec<usize> = (0..n).collect();
    let mut log = MetricLog::new();
    let mut step = 0u64;
    let mut final_mse = f64::NAN;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle);
        let mut epoch_se = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let clean = data.gather_rows(chunk)?;
            let noisy = corrupt(&clean, config.noise_std, &mut noise)?;
            let mut g = Graph::new();
            let x = g.constant(noisy);
            let target = g.constant(clean);
            let recon = model.reconstruct(&mut g, &store, x)?;
            let diff = g.sub(recon, target)?;
            let sq = g.square(diff);
            let loss = g.mean(sq);
            step += 1;
            let lv = g.value(loss).item()?.f64();
            if !lv.is_finite() {
                return Err(Error::Diverged {
                    step,
                    detail: format!("autoencoder loss {lv} in epoch {epoch}"),
                });
            }
            epoch_se += lv * chunk.len() as f64;
            opt.zero_grad(&mut store);
            g.backward(loss, &mut store)?;
            opt.step(&mut store)?;
        }
        final_mse = epoch_se / n as f64;
        log.push(epoch as u64, "ae_recon_mse", final_mse)?;
    }

    store.set_trainable_prefix(model.encoder.prefix(), false);
    Ok(PretrainedAutoencoder {
        store,
        model,
        log,
        final_mse,
    })
}
