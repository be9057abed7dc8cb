use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::autodiff::{checkpoint, ExperimentRng, ParamStore};
use crate::cli::config::{DataKind, ExperimentConfig};
use crate::cli::svg::emit_scatter_svg;
use crate::data::{load_idx, load_idx_labels, DataSource};
use crate::error::{Error, Result};
use crate::metrics::{
    mode_coverage, pairwise_ms_ssim_threads, proxy_classifier_score, ClassifierConfig, Image, ProxyClassifier,
};
use crate::networks::{Mlp, DECODER_PREFIX, ENCODER_PREFIX};
use crate::tensor::{Scalar, Tensor};
use crate::training::{pretrain_autoencoder, to_points, GanModel, GanTrainer};

pub const AE_CHECKPOINT: &str = "autoencoder.rfgn";
pub const MODEL_CHECKPOINT: &str = "model.rfgn";

/// Worker count from `RFGAN_THREADS` (default 1).
pub fn worker_threads() -> Result<usize> {
    match std::env::var("RFGAN_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!("RFGAN_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

pub fn load_data<T: Scalar>(cfg: &ExperimentConfig) -> Result<DataSource<T>> {
    match cfg.data.kind {
        DataKind::Ring => Ok(DataSource::Ring(cfg.ring_spec())),
        DataKind::Idx => {
            let images = cfg.data.images.as_ref().ok_or_else(|| Error::Config("data.images: required".into()))?;
            let pixels = load_idx(images)?;
            let labels = cfg.data.labels.as_ref().map(|p| load_idx_labels(p)).transpose()?;
            DataSource::from_pixels(&pixels, labels)
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::file(path, e))
}

/// Fresh network skeleton whose values are about to be overwritten from a checkpoint.
fn skeleton(spec: crate::networks::NetworkSpec, prefix: &str, store: &mut ParamStore<impl Scalar>) -> Result<Mlp> {
    Mlp::new(spec, prefix, store, &mut ExperimentRng::new(0).stream("skeleton"), false)
}

/// Load the frozen encoder out of an autoencoder checkpoint.
pub fn load_encoder<T: Scalar>(cfg: &ExperimentConfig, data_dim: usize, path: &Path) -> Result<(ParamStore<T>, Mlp)> {
    if !path.is_file() {
        return Err(Error::EncoderRequired);
    }
    let entries: Vec<_> = checkpoint::load::<T>(path)?
        .into_iter()
        .filter(|(name, _)| name.starts_with(ENCODER_PREFIX))
        .collect();
    let mut store = ParamStore::new();
    let enc = skeleton(cfg.architecture(data_dim).encoder()?, ENCODER_PREFIX, &mut store)?;
    if entries.len() != store.len() {
        return Err(Error::Format(format!(
            "{}: {} encoder tensors, expected {}",
            path.display(),
            entries.len(),
            store.len()
        )));
    }
    store.load_values(&entries)?;
    Ok((store, enc))
}

/// Rebuild a trained GAN from its checkpoint.
pub fn load_model<T: Scalar>(cfg: &ExperimentConfig, data_dim: usize, path: &Path) -> Result<GanModel<T>> {
    let arch = cfg.architecture(data_dim);
    let entries = checkpoint::load::<T>(path)?;
    let has_encoder = entries.iter().any(|(n, _)| n.starts_with(ENCODER_PREFIX));
    let mut enc_store = ParamStore::new();
    let enc = if has_encoder {
        Some(skeleton(arch.encoder()?, ENCODER_PREFIX, &mut enc_store)?)
    } else {
        None
    };
    let mut model = GanModel::new(&arch, enc.as_ref().map(|e| (&enc_store, e)), &ExperimentRng::new(0))?;
    if entries.len() != model.store.len() {
        return Err(Error::Format(format!(
            "{}: {} tensors, model has {}",
            path.display(),
            entries.len(),
            model.store.len()
        )));
    }
    model.store.load_values(&entries)?;
    Ok(model)
}

pub fn cmd_pretrain<T: Scalar>(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let data = load_data::<T>(cfg)?;
    let rng = ExperimentRng::new(cfg.seed);
    let train = data.training_set(cfg.ae.train_size, &mut rng.stream("data.ae"))?;
    let arch = cfg.architecture(data.dim());
    let ae = pretrain_autoencoder(&train, arch.encoder()?, arch.decoder()?, &cfg.ae_config(), &rng)?;
    let mut entries = ae.store.named_values(ENCODER_PREFIX);
    entries.extend(ae.store.named_values(DECODER_PREFIX));
    checkpoint::save(&out.join(AE_CHECKPOINT), &entries)?;
    ae.log.write_csv(&out.join("ae_metrics.csv"))
}

pub fn cmd_train<T: Scalar>(cfg: &ExperimentConfig, out: &Path, encoder: Option<&Path>) -> Result<()> {
    let data = load_data::<T>(cfg)?;
    let encoder = if cfg.model.rf {
        let path = encoder.map_or_else(|| out.join(AE_CHECKPOINT), Path::to_path_buf);
        Some(load_encoder::<T>(cfg, data.dim(), &path)?)
    } else {
        None
    };
    ensure_dir(out)?;
    let ckpt_dir = out.join("checkpoints");
    let every = cfg.schedule.checkpoint_every;
    if every > 0 {
        ensure_dir(&ckpt_dir)?;
    }
    let gan = cfg.gan_config(data.dim());
    let mut trainer = GanTrainer::new(gan, &data, encoder.as_ref().map(|(s, e)| (s, e)))?;
    trainer.run(|t| {
        let c = t.cycles_done();
        if every > 0 && c % every == 0 {
            checkpoint::save(&ckpt_dir.join(format!("cycle_{c:07}.rfgn")), &t.model().store.named_values(""))?;
        }
        Ok(())
    })?;
    let (model, log) = trainer.into_parts();
    checkpoint::save(&out.join(MODEL_CHECKPOINT), &model.store.named_values(""))?;
    log.write_csv(&out.join("metrics.csv"))
}

/// Contents of `eval.json`; fields that do not apply to the data are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub samples: usize,
    pub modes_covered: Option<usize>,
    pub high_quality_fraction: Option<f64>,
    pub mode_counts: Option<Vec<usize>>,
    pub ms_ssim_mean: Option<f64>,
    pub proxy_score: Option<f64>,
}

pub fn evaluate<T: Scalar>(cfg: &ExperimentConfig, data: &DataSource<T>, model: &GanModel<T>) -> Result<EvalReport> {
    let rng = ExperimentRng::new(cfg.seed);
    let n = cfg.eval.samples;
    let samples = model.sample(n, &mut rng.stream("eval.samples"))?;
    samples.check_finite("generated samples")?;
    let mut report = EvalReport {
        samples: n,
        modes_covered: None,
        high_quality_fraction: None,
        mode_counts: None,
        ms_ssim_mean: None,
        proxy_score: None,
    };
    match data {
        DataSource::Ring(spec) => {
            let r = mode_coverage(&to_points(&samples)?, &spec.means(), spec.sigma, cfg.eval.mode_threshold)?;
            report.modes_covered = Some(r.modes_covered);
            report.high_quality_fraction = Some(r.high_quality_fraction);
            report.mode_counts = Some(r.counts);
        }
        DataSource::Images { rows, height, width, labels } => {
            let images = (0..n)
                .map(|i| {
                    let v: Vec<f64> = samples.row(i).iter().map(|x| x.f64().clamp(-1.0, 1.0)).collect();
                    Image::from_range(*height, *width, &v, -1.0, 1.0)
                })
                .collect::<Result<Vec<_>>>()?;
            report.ms_ssim_mean = Some(pairwise_ms_ssim_threads(
                &images,
                cfg.eval.ms_ssim_pairs,
                cfg.eval.ms_ssim_levels,
                &mut rng.stream("eval.pairs"),
                worker_threads()?,
            )?);
            if let Some(labels) = labels {
                let clf_cfg = ClassifierConfig {
                    hidden: cfg.eval.classifier_hidden,
                    epochs: cfg.eval.classifier_epochs,
                    ..ClassifierConfig::default()
                };
                let clf = ProxyClassifier::train(&rows.cast(), labels, &clf_cfg, &rng)?;
                report.proxy_score = Some(proxy_classifier_score(&clf.predict_proba(&samples.cast())?)?);
            }
        }
    }
    let values = [report.high_quality_fraction, report.ms_ssim_mean, report.proxy_score];
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("evaluation result".into()));
    }
    Ok(report)
}

fn checkpoint_path(out: &Path, checkpoint: Option<&Path>) -> PathBuf {
    checkpoint.map_or_else(|| out.join(MODEL_CHECKPOINT), Path::to_path_buf)
}

pub fn cmd_eval<T: Scalar>(cfg: &ExperimentConfig, out: &Path, checkpoint: Option<&Path>) -> Result<()> {
    let data = load_data::<T>(cfg)?;
    let model = load_model::<T>(cfg, data.dim(), &checkpoint_path(out, checkpoint))?;
    let report = evaluate(cfg, &data, &model)?;
    ensure_dir(out)?;
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?;
    json.push('\n');
    write_file(&out.join("eval.json"), json)
}

/// Rows `(1-α)·z0 + α·z1` for `α = i/(steps-1)`.
pub fn interpolate_latents<T: Scalar>(z0: &[f64], z1: &[f64], steps: usize) -> Result<Tensor<T>> {
    if steps < 2 {
        return Err(Error::invalid(format!("interpolation needs at least 2 steps, got {steps}")));
    }
    if z0.len() != z1.len() || z0.is_empty() {
        return Err(Error::shape("interpolate", &[z0.len()], &[z1.len()]));
    }
    let d = z0.len();
    Tensor::new(
        vec![steps, d],
        (0..steps)
            .flat_map(|i| {
                let a = i as f64 / (steps - 1) as f64;
                (0..d).map(move |j| T::of((1.0 - a) * z0[j] + a * z1[j]))
            })
            .collect(),
    )
}

pub fn cmd_interpolate<T: Scalar>(
    cfg: &ExperimentConfig,
    out: &Path,
    checkpoint: Option<&Path>,
    z0: Option<&[f64]>,
    z1: Option<&[f64]>,
    steps: usize,
) -> Result<()> {
    let data = load_data::<T>(cfg)?;
    let model = load_model::<T>(cfg, data.dim(), &checkpoint_path(out, checkpoint))?;
    let zd = cfg.model.z_dim;
    let mut rng = ExperimentRng::new(cfg.seed).stream("interpolate");
    let mut end = |given: Option<&[f64]>| -> Result<Vec<f64>> {
        match given {
            Some(z) if z.len() != zd => Err(Error::shape("interpolate z", &[zd], &[z.len()])),
            Some(z) => Ok(z.to_vec()),
            None => Ok(crate::training::latent::<f64>(1, zd, &mut rng).into_data()),
        }
    };
    let (a, b) = (end(z0)?, end(z1)?);
    let z = interpolate_latents::<T>(&a, &b, steps)?;
    let x = model.generate(&z)?;
    x.check_finite("interpolated samples")?;
    ensure_dir(out)?;

    let dim = x.shape()[1];
    let mut csv = String::from("alpha");
    for j in 0..dim {
        let _ = write!(csv, ",x{j}");
    }
    csv.push('\n');
    for i in 0..steps {
        let _ = write!(csv, "{}", i as f64 / (steps - 1) as f64);
        for v in x.row(i) {
            let _ = write!(csv, ",{}", v.f64());
        }
        csv.push('\n');
    }
    write_file(&out.join("interpolation.csv"), csv)?;

    if let Some((h, w)) = data.image_shape() {
        // one row of frames, plain PGM
        let mut pgm = format!("P2\n{} {}\n255\n", w * steps, h);
        for r in 0..h {
            let line: Vec<String> = (0..steps * w)
                .map(|c| {
                    let v = x.row(c / w)[r * w + c % w].f64().clamp(-1.0, 1.0);
                    (((v + 1.0) * 127.5).round() as u8).to_string()
                })
                .collect();
            pgm.push_str(&line.join(" "));
            pgm.push('\n');
        }
        write_file(&out.join("interpolation.pgm"), pgm)?;
    }
    Ok(())
}

pub fn cmd_plot<T: Scalar>(cfg: &ExperimentConfig, out: &Path, checkpoint: Option<&Path>) -> Result<()> {
    let data = load_data::<T>(cfg)?;
    let spec = *data
        .ring()
        .ok_or_else(|| Error::invalid("plot draws 2-D ring runs only"))?;
    let model = load_model::<T>(cfg, data.dim(), &checkpoint_path(out, checkpoint))?;
    let rng = ExperimentRng::new(cfg.seed);
    let fake = to_points(&model.sample(cfg.eval.samples, &mut rng.stream("plot.fake"))?)?;
    let real = to_points(&data.sample_batch(cfg.eval.samples, &mut rng.stream("plot.real"))?)?;
    ensure_dir(out)?;
    emit_scatter_svg(&fake, &spec.means(), &out.join("samples.svg"))?;
    emit_scatter_svg(&real, &spec.means(), &out.join("real.svg"))
}
