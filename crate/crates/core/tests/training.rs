use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfgan::autodiff::{AdamConfig, ExperimentRng, ParamStore};
use rfgan::data::{DataSource, RingSpec};
use rfgan::losses::{LossConfig, LossKind, Penalty};
use rfgan::networks::{build_mlp_feature_extractor, build_mlp_generator, Architecture, Mlp, ENCODER_PREFIX};
use rfgan::training::{
    pretrain_autoencoder, reconstruction_mse, train_gan, AeConfig, GanConfig, GanTrainer, TrainSchedule,
};
use rfgan::{Error, Tensor};

fn small_arch() -> Architecture {
    Architecture { g_hidden: vec![16], d_hidden: vec![16], d1: 8, d2: 8, ..Architecture::ring() }
}

fn small_config(cycles: u64, seed: u64) -> GanConfig {
    GanConfig {
        arch: small_arch(),
        schedule: TrainSchedule { cycles, batch_size: 32, seed, ..TrainSchedule::default() },
        metrics_every: 5,
        eval_samples: 200,
        ..GanConfig::default()
    }
}

fn frozen_encoder(arch: &Architecture) -> (ParamStore<f64>, Mlp) {
    let mut store = ParamStore::new();
    let enc = Mlp::new(arch.encoder().unwrap(), ENCODER_PREFIX, &mut store, &mut ExperimentRng::new(2).stream("e"), false)
        .unwrap();
    (store, enc)
}

#[test]
fn autoencoder_overfits_four_points_without_noise() {
    let data = Tensor::from_rows(&[vec![0.5, -0.5], vec![-0.8, 0.1], vec![0.2, 0.9], vec![-0.3, -0.7]]).unwrap();
    let cfg = AeConfig {
        epochs: 3000,
        batch_size: 4,
        noise_std: 0.0,
        adam: AdamConfig { lr: 3e-3, beta1: 0.9, ..AdamConfig::default() },
    };
    let enc = build_mlp_feature_extractor(2, &[32], 16).unwrap();
    let dec = build_mlp_generator(16, &[32], 2, false).unwrap();
    let ae = pretrain_autoencoder(&data, enc, dec, &cfg, &ExperimentRng::new(0)).unwrap();
    let mse = reconstruction_mse(&ae.store, &ae.model, &data, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(mse < 1e-3, "mse {mse}");
    assert_eq!(mse, {
        let r = ae.model.reconstruct_value(&ae.store, &data).unwrap();
        r.data().iter().zip(data.data()).map(|(a, b): (&f64, &f64)| (a - b).powi(2)).sum::<f64>() / 8.0
    });
}

#[test]
fn autoencoder_divergence_aborts() {
    let data = Tensor::<f32>::from_fn(&[64, 2], |i| ((i * 13 % 17) as f32 / 8.5) - 1.0);
    let cfg = AeConfig { epochs: 50, batch_size: 16, adam: AdamConfig::with_lr(1e12), ..AeConfig::default() };
    let arch = Architecture::ring();
    let err = pretrain_autoencoder(&data, arch.encoder().unwrap(), arch.decoder().unwrap(), &cfg, &ExperimentRng::new(0))
        .unwrap_err();
    assert!(matches!(err, Error::Diverged { .. } | Error::NonFinite(_)), "{err}");
}

#[test]
fn gan_with_nan_data_aborts_with_diverged() {
    let rows = Tensor::from_fn(&[8, 2], |i| if i == 3 { f64::NAN } else { 0.1 });
    let data = DataSource::Images { rows, height: 1, width: 2, labels: None };
    let mut cfg = small_config(3, 0);
    cfg.schedule.batch_size = 64;
    let err = train_gan(cfg, &data, None).unwrap_err();
    assert!(matches!(err, Error::Diverged { step: 1, .. }), "{err}");
}

#[test]
fn penalties_train_and_log() {
    let data = DataSource::<f64>::Ring(RingSpec::default());
    let arch = small_arch();
    let (es, enc) = frozen_encoder(&arch);
    for (kind, penalty) in [(LossKind::Wasserstein, Penalty::WganGp(10.0)), (LossKind::NonSaturating, Penalty::Dragan(10.0))] {
        let mut cfg = small_config(6, 1);
        cfg.loss = LossConfig { kind, penalty };
        cfg.schedule = TrainSchedule { cycles: 6, batch_size: 32, seed: 1, ..TrainSchedule::wgan_gp() };
        let mut t = GanTrainer::new(cfg, &data, Some((&es, &enc))).unwrap();
        let before = t.model().encoder_digest();
        t.run(|_| Ok(())).unwrap();
        assert_eq!(t.d_updates(), 30);
        assert_eq!(t.g_updates(), 6);
        assert_eq!(before, t.model().encoder_digest());
        let pen = t.log().series("penalty");
        assert_eq!(pen.len(), 3);
        assert!(pen.iter().all(|&(_, v)| v >= 0.0));
    }
}

#[test]
fn all_losses_run_with_rf_head() {
    let data = DataSource::<f64>::Ring(RingSpec::default());
    let arch = small_arch();
    let (es, enc) = frozen_encoder(&arch);
    for kind in [LossKind::Minimax, LossKind::NonSaturating, LossKind::LeastSquares, LossKind::Wasserstein] {
        let mut cfg = small_config(4, 2);
        cfg.loss.kind = kind;
        let (_, log) = train_gan(cfg, &data, Some((&es, &enc))).unwrap();
        for m in ["d_loss", "g_loss", "y_real", "y_fake", "repr_margin", "disc_margin", "modes_covered"] {
            assert!(log.last(m).is_some(), "{kind:?} missing {m}");
        }
        if kind.uses_sigmoid() {
            assert!((0.0..=1.0).contains(&log.last("y_real").unwrap()));
        }
    }
}

#[test]
fn seed_seven_twice_gives_identical_logs() {
    let data = DataSource::<f32>::Ring(RingSpec::default());
    let run = || {
        let mut cfg = small_config(12, 7);
        cfg.arch = small_arch();
        train_gan(cfg, &data, None).unwrap().1.to_csv()
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.starts_with("step,metric,value\n"));
    assert!(!a.contains('\r'));
}

#[test]
fn schedule_and_config_validation() {
    let data = DataSource::<f64>::Ring(RingSpec::default());
    let mut cfg = small_config(1, 0);
    cfg.schedule.g_steps = 0;
    assert!(GanTrainer::new(cfg, &data, None).is_err());
    let mut cfg = small_config(1, 0);
    cfg.loss.penalty = Penalty::WganGp(-1.0);
    assert!(GanTrainer::new(cfg, &data, None).is_err());
    let mut cfg = small_config(1, 0);
    cfg.arch.data_dim = 3;
    assert!(GanTrainer::new(cfg, &data, None).is_err());
    assert_eq!(TrainSchedule::default().g_steps, 2);
    assert_eq!(TrainSchedule::wgan_gp().d_steps, 5);
}
