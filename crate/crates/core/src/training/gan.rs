use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::autodiff::{sigmoid, Adam, AdamConfig, ExperimentRng, Graph, ParamStore};
use crate::data::DataSource;
use crate::error::{Error, Result};
use crate::losses::{d_loss_node, g_loss_node, gradient_penalty, LossConfig, Penalty};
use crate::metrics::{mode_coverage, ModeReport};
use crate::networks::{Architecture, Mlp, RfDiscriminator, ENCODER_PREFIX, GENERATOR_PREFIX};
use crate::tensor::{Scalar, Tensor};
use crate::training::log::MetricLog;

/// Update counts per cycle and run length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainSchedule {
    pub g_steps: usize,
    pub d_steps: usize,
    pub cycles: u64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        TrainSchedule {
            g_steps: 2,
            d_steps: 1,
            cycles: 25_000,
            batch_size: 256,
            seed: 0,
        }
    }
}

impl TrainSchedule {
    /// One generator update after five critic updates.
    pub fn wgan_gp() -> Self {
        TrainSchedule {
            g_steps: 1,
            d_steps: 5,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g_steps == 0 || self.d_steps == 0 || self.cycles == 0 || self.batch_size == 0 {
            return Err(Error::invalid("schedule steps, cycles and batch size must all be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GanConfig {
    pub arch: Architecture,
    pub loss: LossConfig,
    pub schedule: TrainSchedule,
    pub adam: AdamConfig,
    /// log metrics on cycle 1, every `metrics_every` cycles and on the last cycle
    pub metrics_every: u64,
    /// generator samples drawn for mode coverage on 2-D ring runs (0 disables)
    pub eval_samples: usize,
    pub coverage_threshold: Option<f64>,
}

impl Default for GanConfig {
    fn default() -> Self {
        GanConfig {
            arch: Architecture::ring(),
            loss: LossConfig::default(),
            schedule: TrainSchedule::default(),
            adam: AdamConfig::default(),
            metrics_every: 500,
            eval_samples: 2_500,
            coverage_threshold: None,
        }
    }
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        self.schedule.validate()?;
        self.adam.validate()?;
        if self.metrics_every == 0 {
            return Err(Error::invalid("metrics_every must be positive"));
        }
        Ok(())
    }
}

/// Generator plus (RF) discriminator sharing one parameter store.
#[derive(Debug, Clone)]
pub struct GanModel<T> {
    pub store: ParamStore<T>,
    pub generator: Mlp,
    pub disc: RfDiscriminator,
}

impl<T: Scalar> GanModel<T> {
    /// Build from the streams `init.G`, `init.D`, `init.head`. A given encoder
    /// is copied into the new store frozen, under its own names.
    pub fn new(arch: &Architecture, encoder: Option<(&ParamStore<T>, &Mlp)>, rng: &ExperimentRng) -> Result<Self> {
        let mut store = ParamStore::new();
        let generator = Mlp::new(arch.generator()?, GENERATOR_PREFIX, &mut store, &mut rng.stream("init.G"), true)?;
        let encoder = match encoder {
            Some((src, enc)) => {
                if enc.input_dim() != arch.data_dim {
                    return Err(Error::shape("encoder input", &[arch.data_dim], &[enc.input_dim()]));
                }
                if !enc.prefix().starts_with(ENCODER_PREFIX) {
                    return Err(Error::invalid(format!("encoder prefix `{}` is not `{ENCODER_PREFIX}`", enc.prefix())));
                }
                Some(enc.transplant(src, &mut store, false)?)
            }
            None => None,
        };
        let disc = RfDiscriminator::new(arch.disc_body()?, encoder, &mut store, rng)?;
        Ok(GanModel { store, generator, disc })
    }

    pub fn has_encoder(&self) -> bool {
        self.disc.encoder.is_some()
    }

    /// SHA-256 over encoder names and bytes.
    pub fn encoder_digest(&self) -> [u8; 32] {
        self.store.digest(ENCODER_PREFIX)
    }

    pub fn generate(&self, z: &Tensor<T>) -> Result<Tensor<T>> {
        self.generator.forward_value(&self.store, z)
    }

    pub fn sample(&self, n: usize, rng: &mut impl rand::Rng) -> Result<Tensor<T>> {
        let z = latent(n, self.generator.input_dim(), rng);
        self.generate(&z)
    }
}

/// `[n, dim]` standard normal draws.
pub fn latent<T: Scalar>(n: usize, dim: usize, rng: &mut impl rand::Rng) -> Tensor<T> {
    Tensor::from_fn(&[n, dim], |_| {
        let v: f64 = StandardNormal.sample(rng);
        T::of(v)
    })
}

/// `(mean(h1·w1 | real) - mean(h1·w1 | fake), mean(h2·w2 | real) - mean(h2·w2 | fake))`.
/// The first entry is 0 without an encoder.
pub fn head_balance_diagnostic<T: Scalar>(
    disc: &RfDiscriminator,
    store: &ParamStore<T>,
    real: &Tensor<T>,
    fake: &Tensor<T>,
) -> Result<(f64, f64)> {
    let d = disc.input_dim();
    for t in [real, fake] {
        let (n, m) = t.dims2()?;
        if m != d {
            return Err(Error::shape("head_balance_diagnostic", &[n, d], t.shape()));
        }
    }
    let mut g = Graph::new();
    let r = g.constant(real.clone());
    let f = g.constant(fake.clone());
    let out_r = disc.forward(&mut g, store, r)?;
    let out_f = disc.forward(&mut g, store, f)?;
    let mean = |id| g.value(id).mean().f64();
    let repr = match (out_r.repr_term, out_f.repr_term) {
        (Some(a), Some(b)) => mean(a) - mean(b),
        _ => 0.0,
    };
    Ok((repr, mean(out_r.disc_term) - mean(out_f.disc_term)))
}

/// What one discriminator step saw, before its update.
#[derive(Debug, Clone)]
pub struct DStep<T> {
    /// adversarial part only
    pub loss: f64,
    pub penalty: f64,
    pub mean_real: f64,
    pub mean_fake: f64,
    pub real: Tensor<T>,
    pub fake: Tensor<T>,
}

/// Alternating GAN optimization with per-purpose random streams
/// (`data.real`, `z`, `penalty`, `eval`).
pub struct GanTrainer<'a, T: Scalar> {
    config: GanConfig,
    data: &'a DataSource<T>,
    model: GanModel<T>,
    opt_g: Adam<T>,
    opt_d: Adam<T>,
    data_rng: ChaCha8Rng,
    z_rng: ChaCha8Rng,
    penalty_rng: ChaCha8Rng,
    eval_rng: ChaCha8Rng,
    cycle: u64,
    g_updates: u64,
    d_updates: u64,
    log: MetricLog,
    last_d: Option<DStep<T>>,
    last_g: f64,
}

impl<'a, T: Scalar> GanTrainer<'a, T> {
    pub fn new(config: GanConfig, data: &'a DataSource<T>, encoder: Option<(&ParamStore<T>, &Mlp)>) -> Result<Self> {
        config.validate()?;
        if data.dim() != config.arch.data_dim {
            return Err(Error::shape("train_gan data", &[config.arch.data_dim], &[data.dim()]));
        }
        let rng = ExperimentRng::new(config.schedule.seed);
        let model = GanModel::new(&config.arch, encoder, &rng)?;
        let opt_g = Adam::new(&model.store, model.generator.param_ids(), config.adam);
        let opt_d = Adam::new(&model.store, model.disc.trainable_ids(), config.adam);
        Ok(GanTrainer {
            data,
            model,
            opt_g,
            opt_d,
            data_rng: rng.stream("data.real"),
            z_rng: rng.stream("z"),
            penalty_rng: rng.stream("penalty"),
            eval_rng: rng.stream("eval"),
            cycle: 0,
            g_updates: 0,
            d_updates: 0,
            log: MetricLog::new(),
            last_d: None,
            last_g: f64::NAN,
            config,
        })
    }

    pub fn config(&self) -> &GanConfig {
        &self.config
    }

    pub fn model(&self) -> &GanModel<T> {
        &self.model
    }

    pub fn log(&self) -> &MetricLog {
        &self.log
    }

    pub fn cycles_done(&self) -> u64 {
        self.cycle
    }

    pub fn g_updates(&self) -> u64 {
        self.g_updates
    }

    pub fn d_updates(&self) -> u64 {
        self.d_updates
    }

    pub fn into_parts(self) -> (GanModel<T>, MetricLog) {
        (self.model, self.log)
    }

    fn diverged(&self, what: &str, v: f64) -> Error {
        Error::Diverged {
            step: self.cycle + 1,
            detail: format!("{what} = {v}"),
        }
    }

    /// One discriminator update on a fresh real batch and a fresh `G(z)` batch.
    pub fn d_step(&mut self) -> Result<DStep<T>> {
        let n = self.config.schedule.batch_size;
        let real = self.data.sample_batch(n, &mut self.data_rng)?;
        let z = latent(n, self.model.generator.input_dim(), &mut self.z_rng);
        let fake = self.model.generate(&z)?;

        let model = &self.model;
        let mut g = Graph::new();
        let r = g.constant(real.clone());
        let f = g.constant(fake.clone());
        let out_r = model.disc.forward(&mut g, &model.store, r)?;
        let out_f = model.disc.forward(&mut g, &model.store, f)?;
        let adv = d_loss_node(&mut g, self.config.loss.kind, out_r.logit, out_f.logit)?;
        let (total, pen) = match self.config.loss.penalty {
            Penalty::None => (adv, None),
            p => {
                let mut critic = |g: &mut Graph<T>, x| Ok(model.disc.forward(g, &model.store, x)?.logit);
                let pen = gradient_penalty(&mut g, p, &mut critic, &real, &fake, &mut self.penalty_rng)?;
                (g.add(adv, pen)?, Some(pen))
            }
        };
        let loss = g.value(adv).item()?.f64();
        let penalty = pen.map_or(Ok(0.0), |p| g.value(p).item().map(|v| v.f64()))?;
        if !(loss + penalty).is_finite() {
            return Err(self.diverged("d_loss", loss + penalty));
        }
        let squash = self.config.loss.kind.uses_sigmoid();
        let mean_out = |id| {
            let v = g.value(id);
            v.data().iter().map(|&x| if squash { sigmoid(x).f64() } else { x.f64() }).sum::<f64>() / v.len() as f64
        };
        let (mean_real, mean_fake) = (mean_out(out_r.logit), mean_out(out_f.logit));

        let ids = self.model.disc.trainable_ids();
        self.opt_d.zero_grad(&mut self.model.store);
        g.backward_for(total, &mut self.model.store, &ids)?;
        self.opt_d.step(&mut self.model.store)?;
        self.d_updates += 1;
        Ok(DStep {
            loss,
            penalty,
            mean_real,
            mean_fake,
            real,
            fake,
        })
    }

    /// One generator update through the full discriminator head; returns the loss before the update.
    pub fn g_step(&mut self) -> Result<f64> {
        let n = self.config.schedule.batch_size;
        let z = latent(n, self.model.generator.input_dim(), &mut self.z_rng);
        let mut g = Graph::new();
        let zn = g.constant(z);
        let x = self.model.generator.forward(&mut g, &self.model.store, zn)?;
        let out = self.model.disc.forward(&mut g, &self.model.store, x)?;
        let loss = g_loss_node(&mut g, self.config.loss.kind, out.logit)?;
        let lv = g.value(loss).item()?.f64();
        if !lv.is_finite() {
            return Err(self.diverged("g_loss", lv));
        }
        let ids = self.model.generator.param_ids();
        self.opt_g.zero_grad(&mut self.model.store);
        g.backward_for(loss, &mut self.model.store, &ids)?;
        self.opt_g.step(&mut self.model.store)?;
        self.g_updates += 1;
        Ok(lv)
    }

    /// Discriminator steps, then generator steps, then metrics when due.
    pub fn cycle(&mut self) -> Result<()> {
        for _ in 0..self.config.schedule.d_steps {
            self.last_d = Some(self.d_step()?);
        }
        for _ in 0..self.config.schedule.g_steps {
            self.last_g = self.g_step()?;
        }
        self.cycle += 1;
        let c = self.cycle;
        if c == 1 || c % self.config.metrics_every == 0 || c == self.config.schedule.cycles {
            self.record_metrics()?;
        }
        Ok(())
    }

    fn record_metrics(&mut self) -> Result<()> {
        let c = self.cycle;
        let d = self.last_d.as_ref().expect("metrics recorded after a discriminator step");
        self.log.push(c, "d_loss", d.loss)?;
        self.log.push(c, "g_loss", self.last_g)?;
        if self.config.loss.penalty != Penalty::None {
            self.log.push(c, "penalty", d.penalty)?;
        }
        self.log.push(c, "y_real", d.mean_real)?;
        self.log.push(c, "y_fake", d.mean_fake)?;
        let (repr, disc) = head_balance_diagnostic(&self.model.disc, &self.model.store, &d.real, &d.fake)?;
        if self.model.has_encoder() {
            self.log.push(c, "repr_margin", repr)?;
        }
        self.log.push(c, "disc_margin", disc)?;
        if let (Some(spec), true) = (self.data.ring(), self.config.eval_samples > 0) {
            let report = self.coverage(*spec)?;
            self.log.push(c, "modes_covered", report.modes_covered as f64)?;
            self.log.push(c, "high_quality_fraction", report.high_quality_fraction)?;
        }
        Ok(())
    }

    fn coverage(&mut self, spec: crate::data::RingSpec) -> Result<ModeReport> {
        let samples = self.model.sample(self.config.eval_samples, &mut self.eval_rng)?;
        mode_coverage(&to_points(&samples)?, &spec.means(), spec.sigma, self.config.coverage_threshold)
    }

    /// Run the remaining cycles; `after_cycle` sees the trainer after every cycle.
    pub fn run(&mut self, mut after_cycle: impl FnMut(&Self) -> Result<()>) -> Result<()> {
        while self.cycle < self.config.schedule.cycles {
            self.cycle()?;
            after_cycle(self)?;
        }
        Ok(())
    }
}

/// Rows of a `[n, 2]` tensor as points.
pub fn to_points<T: Scalar>(t: &Tensor<T>) -> Result<Vec<[f64; 2]>> {
    let (n, m) = t.dims2()?;
    if m != 2 {
        return Err(Error::shape("points", &[n, 2], t.shape()));
    }
    Ok((0..n).map(|r| [t.row(r)[0].f64(), t.row(r)[1].f64()]).collect())
}

/// Build, run the full schedule, and return the model with its metric log.
pub fn train_gan<T: Scalar>(
    config: GanConfig,
    data: &DataSource<T>,
    encoder: Option<(&ParamStore<T>, &Mlp)>,
) -> Result<(GanModel<T>, MetricLog)> {
    let mut trainer = GanTrainer::new(config, data, encoder)?;
    trainer.run(|_| Ok(()))?;
    Ok(trainer.into_parts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RingSpec;
    use crate::networks::build_mlp_feature_extractor;

    fn tiny_config(cycles: u64) -> GanConfig {
        GanConfig {
            arch: Architecture {
                data_dim: 2,
                z_dim: 2,
                g_hidden: vec![8],
                d_hidden: vec![8],
                d1: 4,
                d2: 6,
                tanh_output: false,
            },
            schedule: TrainSchedule { cycles, batch_size: 16, seed: 7, ..TrainSchedule::default() },
            metrics_every: 2,
            eval_samples: 100,
            ..GanConfig::default()
        }
    }

    fn frozen_encoder(cfg: &GanConfig) -> (ParamStore<f64>, Mlp) {
        let mut store = ParamStore::new();
        let spec = build_mlp_feature_extractor(2, &cfg.arch.d_hidden, cfg.arch.d1).unwrap();
        let enc = Mlp::new(spec, ENCODER_PREFIX, &mut store, &mut ExperimentRng::new(1).stream("e"), false).unwrap();
        (store, enc)
    }

    #[test]
    fn schedule_accounting() {
        let data = DataSource::<f64>::Ring(RingSpec::default());
        let mut cfg = tiny_config(3);
        cfg.schedule.g_steps = 2;
        cfg.schedule.d_steps = 3;
        let mut t = GanTrainer::new(cfg, &data, None).unwrap();
        t.run(|_| Ok(())).unwrap();
        assert_eq!(t.g_updates(), 6);
        assert_eq!(t.d_updates(), 9);
        assert_eq!(t.log().series("d_loss").iter().map(|r| r.0).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn zero_learning_rate_changes_nothing() {
        let data = DataSource::<f64>::Ring(RingSpec::default());
        let mut cfg = tiny_config(3);
        cfg.adam.lr = 0.0;
        let (es, enc) = frozen_encoder(&cfg);
        let mut t = GanTrainer::new(cfg, &data, Some((&es, &enc))).unwrap();
        let before = t.model().store.digest("");
        t.run(|_| Ok(())).unwrap();
        assert_eq!(before, t.model().store.digest(""));
    }

    #[test]
    fn d_step_leaves_generator_and_g_step_leaves_discriminator() {
        let data = DataSource::<f64>::Ring(RingSpec::default());
        let cfg = tiny_config(1);
        let (es, enc) = frozen_encoder(&cfg);
        let mut t = GanTrainer::new(cfg, &data, Some((&es, &enc))).unwrap();
        let g0 = t.model().store.digest(GENERATOR_PREFIX);
        let d0 = t.model().store.digest("D.");
        let h0 = t.model().store.digest("head.");
        let e0 = t.model().encoder_digest();
        t.d_step().unwrap();
        assert_eq!(g0, t.model().store.digest(GENERATOR_PREFIX));
        assert_ne!(d0, t.model().store.digest("D."));
        let d1 = t.model().store.digest("D.");
        let h1 = t.model().store.digest("head.");
        assert_ne!(h0, h1);
        t.g_step().unwrap();
        assert_ne!(g0, t.model().store.digest(GENERATOR_PREFIX));
        assert_eq!(d1, t.model().store.digest("D."));
        assert_eq!(h1, t.model().store.digest("head."));
        assert_eq!(e0, t.model().encoder_digest());
    }

    #[test]
    fn same_seed_same_log() {
        let data = DataSource::<f64>::Ring(RingSpec::default());
        let (_, a) = train_gan(tiny_config(4), &data, None).unwrap();
        let (_, b) = train_gan(tiny_config(4), &data, None).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.last("modes_covered").is_some());
    }

    #[test]
    fn diagnostic_margins() {
        let cfg = tiny_config(1);
        let (es, enc) = frozen_encoder(&cfg);
        let mut model = GanModel::<f64>::new(&cfg.arch, Some((&es, &enc)), &ExperimentRng::new(0)).unwrap();
        let x = Tensor::from_fn(&[5, 2], |i| i as f64 * 0.3 - 1.0);
        assert_eq!(head_balance_diagnostic(&model.disc, &model.store, &x, &x).unwrap(), (0.0, 0.0));
        let w1 = model.disc.w_repr.unwrap();
        model.store.get_mut(w1).value.data_mut().fill(0.0);
        let y = x.map(|v| v * 2.0);
        let (repr, disc) = head_balance_diagnostic(&model.disc, &model.store, &x, &y).unwrap();
        assert_eq!(repr, 0.0);
        assert_ne!(disc, 0.0);
    }

    #[test]
    fn encoder_must_match_data() {
        let cfg = tiny_config(1);
        let mut store = ParamStore::<f64>::new();
        let spec = build_mlp_feature_extractor(3, &[4], 4).unwrap();
        let enc = Mlp::new(spec, ENCODER_PREFIX, &mut store, &mut ExperimentRng::new(1).stream("e"), false).unwrap();
        assert!(GanModel::new(&cfg.arch, Some((&store, &enc)), &ExperimentRng::new(0)).is_err());
    }
}
