//! JSON experiment configuration.

use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::autodiff::AdamConfig;
use crate::data::RingSpec;
use crate::error::{Error, Result};
use crate::losses::{LossConfig, LossKind, Penalty};
use crate::networks::Architecture;
use crate::training::{AeConfig, GanConfig, TrainSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    #[default]
    Ring,
    Idx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub kind: DataKind,
    pub k: usize,
    pub radius: f64,
    pub sigma: f64,
    /// IDX image file (`kind = "idx"`)
    pub images: Option<PathBuf>,
    /// optional IDX label file, used by the proxy classifier
    pub labels: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        let ring = RingSpec::default();
        DataConfig {
            kind: DataKind::Ring,
            k: ring.k,
            radius: ring.radius,
            sigma: ring.sigma,
            images: None,
            labels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub z_dim: usize,
    pub g_hidden: Vec<usize>,
    pub d_hidden: Vec<usize>,
    pub d1: usize,
    pub d2: usize,
    /// defaults to true for image data, false for the ring
    pub tanh_output: Option<bool>,
    /// attach the pretrained encoder to the discriminator head
    pub rf: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let a = Architecture::ring();
        ModelConfig {
            z_dim: a.z_dim,
            g_hidden: a.g_hidden,
            d_hidden: a.d_hidden,
            d1: a.d1,
            d2: a.d2,
            tanh_output: None,
            rf: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    #[default]
    None,
    WganGp,
    Dragan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossSection {
    pub kind: LossKind,
    pub penalty: PenaltyKind,
    pub lambda: f64,
}

impl Default for LossSection {
    fn default() -> Self {
        LossSection {
            kind: LossKind::NonSaturating,
            penalty: PenaltyKind::None,
            lambda: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub g_steps: usize,
    pub d_steps: usize,
    pub cycles: u64,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub metrics_every: u64,
    /// 0 writes only the final checkpoint
    pub checkpoint_every: u64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let s = TrainSchedule::default();
        let a = AdamConfig::default();
        ScheduleConfig {
            g_steps: s.g_steps,
            d_steps: s.d_steps,
            cycles: s.cycles,
            batch_size: s.batch_size,
            lr: a.lr,
            beta1: a.beta1,
            beta2: a.beta2,
            metrics_every: 500,
            checkpoint_every: 5_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AeSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub noise_std: f64,
    pub lr: f64,
    /// ring points drawn once for pretraining
    pub train_size: usize,
}

impl Default for AeSection {
    fn default() -> Self {
        let a = AeConfig::default();
        AeSection {
            epochs: a.epochs,
            batch_size: a.batch_size,
            noise_std: a.noise_std,
            lr: a.adam.lr,
            train_size: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub samples: usize,
    pub mode_threshold: Option<f64>,
    pub ms_ssim_pairs: usize,
    pub ms_ssim_levels: usize,
    pub classifier_epochs: usize,
    pub classifier_hidden: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            samples: 2_500,
            mode_threshold: None,
            ms_ssim_pairs: 10_000,
            ms_ssim_levels: 5,
            classifier_epochs: 5,
            classifier_hidden: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub loss: LossSection,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub ae: AeSection,
    #[serde(default)]
    pub eval: EvalSection,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

/// Rewrite serde's unknown-field message with the closest allowed key.
fn describe_parse_error(err: &serde_json::Error) -> String {
    let msg = err.to_string();
    let unknown = Regex::new(r"unknown (?:field|variant) `([^`]*)`, expected (.*?)(?: at line \d+ column \d+)?$")
        .expect("static regex");
    let location = format!("line {} column {}", err.line(), err.column());
    let Some(caps) = unknown.captures(&msg) else {
        return msg;
    };
    let bad = &caps[1];
    let tick = Regex::new(r"`([^`]*)`").expect("static regex");
    let best = tick
        .captures_iter(&caps[2])
        .map(|c| c[1].to_string())
        .min_by_key(|cand| strsim::levenshtein(bad, cand));
    let kind = if msg.starts_with("unknown variant") { "value" } else { "key" };
    match best {
        Some(s) if strsim::levenshtein(bad, &s) <= 3 => {
            format!("unknown {kind} `{bad}` at {location} (did you mean `{s}`?)")
        }
        _ => format!("unknown {kind} `{bad}` at {location}, expected {}", &caps[2]),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(describe_parse_error(&e)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read, parse and validate. Relative data paths resolve against the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), describe_parse_error(&e))))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data.images, &mut cfg.data.labels].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(field_error("name", "must not be empty"));
        }
        match self.data.kind {
            DataKind::Ring => self.ring_spec().validate().map_err(|e| field_error("data", e))?,
            DataKind::Idx => {
                let images = self.data.images.as_ref().ok_or_else(|| field_error("data.images", "required for idx data"))?;
                for (field, p) in [("data.images", Some(images)), ("data.labels", self.data.labels.as_ref())] {
                    if let Some(p) = p {
                        if !p.is_file() {
                            return Err(field_error(field, format!("{} does not exist", p.display())));
                        }
                    }
                }
            }
        }
        let m = &self.model;
        for (field, v) in [("model.z_dim", m.z_dim), ("model.d1", m.d1), ("model.d2", m.d2)] {
            if v == 0 {
                return Err(field_error(field, "must be positive"));
            }
        }
        if m.g_hidden.is_empty() || m.g_hidden.contains(&0) {
            return Err(field_error("model.g_hidden", "needs at least one positive width"));
        }
        if m.d_hidden.contains(&0) {
            return Err(field_error("model.d_hidden", "widths must be positive"));
        }
        if !(self.loss.lambda > 0.0 && self.loss.lambda.is_finite()) {
            return Err(field_error("loss.lambda", format!("must be positive, got {}", self.loss.lambda)));
        }
        let s = &self.schedule;
        for (field, v) in [
            ("schedule.g_steps", s.g_steps as u64),
            ("schedule.d_steps", s.d_steps as u64),
            ("schedule.cycles", s.cycles),
            ("schedule.batch_size", s.batch_size as u64),
            ("schedule.metrics_every", s.metrics_every),
        ] {
            if v == 0 {
                return Err(field_error(field, "must be positive"));
            }
        }
        self.adam().validate().map_err(|e| field_error("schedule", e))?;
        self.ae_config().validate().map_err(|e| field_error("ae", e))?;
        if self.data.kind == DataKind::Ring && self.ae.train_size == 0 {
            return Err(field_error("ae.train_size", "must be positive"));
        }
        let e = &self.eval;
        if e.samples < 2 {
            return Err(field_error("eval.samples", "must be at least 2"));
        }
        if e.ms_ssim_pairs == 0 {
            return Err(field_error("eval.ms_ssim_pairs", "must be positive"));
        }
        if !(1..=5).contains(&e.ms_ssim_levels) {
            return Err(field_error("eval.ms_ssim_levels", "must be between 1 and 5"));
        }
        if let Some(t) = e.mode_threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(field_error("eval.mode_threshold", "must be >= 0"));
            }
        }
        if e.classifier_epochs == 0 || e.classifier_hidden == 0 {
            return Err(field_error("eval", "classifier epochs and width must be positive"));
        }
        Ok(())
    }

    pub fn ring_spec(&self) -> RingSpec {
        RingSpec {
            k: self.data.k,
            radius: self.data.radius,
            sigma: self.data.sigma,
        }
    }

    pub fn architecture(&self, data_dim: usize) -> Architecture {
        let m = &self.model;
        Architecture {
            data_dim,
            z_dim: m.z_dim,
            g_hidden: m.g_hidden.clone(),
            d_hidden: m.d_hidden.clone(),
            d1: m.d1,
            d2: m.d2,
            tanh_output: m.tanh_output.unwrap_or(self.data.kind == DataKind::Idx),
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.schedule.lr,
            beta1: self.schedule.beta1,
            beta2: self.schedule.beta2,
            ..AdamConfig::default()
        }
    }

    pub fn loss_config(&self) -> LossConfig {
        let l = self.loss.lambda;
        LossConfig {
            kind: self.loss.kind,
            penalty: match self.loss.penalty {
                PenaltyKind::None => Penalty::None,
                PenaltyKind::WganGp => Penalty::WganGp(l),
                PenaltyKind::Dragan => Penalty::Dragan(l),
            },
        }
    }

    pub fn gan_config(&self, data_dim: usize) -> GanConfig {
        let s = &self.schedule;
        GanConfig {
            arch: self.architecture(data_dim),
            loss: self.loss_config(),
            schedule: TrainSchedule {
                g_steps: s.g_steps,
                d_steps: s.d_steps,
                cycles: s.cycles,
                batch_size: s.batch_size,
                seed: self.seed,
            },
            adam: self.adam(),
            metrics_every: s.metrics_every,
            eval_samples: self.eval.samples,
            coverage_threshold: self.eval.mode_threshold,
        }
    }

    pub fn ae_config(&self) -> AeConfig {
        let base = AeConfig::default();
        AeConfig {
            epochs: self.ae.epochs,
            batch_size: self.ae.batch_size,
            noise_std: self.ae.noise_std,
            adam: AdamConfig { lr: self.ae.lr, ..base.adam },
        }
    }
}
