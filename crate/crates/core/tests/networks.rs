mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfgan::autodiff::{ExperimentRng, Feeds, ParamStore};
use rfgan::networks::{
    build_mlp_feature_extractor, build_mlp_generator, Activation, Architecture, Mlp, RfDiscriminator, ENCODER_PREFIX,
};
use rfgan::training::GanModel;
use rfgan::Tensor;

/// Plain nested loops over the stored weights.
fn manual_forward(net: &Mlp, store: &ParamStore<f64>, x: &[f64]) -> Vec<f64> {
    let mut h = x.to_vec();
    for ((w, b), layer) in net.layer_params().iter().zip(net.spec().layers()) {
        let (wv, bv) = (store.value(*w), store.value(*b));
        let mut next = vec![0.0; layer.output];
        for (j, out) in next.iter_mut().enumerate() {
            let mut acc = bv.data()[j];
            for (i, hi) in h.iter().enumerate() {
                acc += hi * wv.data()[i * layer.output + j];
            }
            *out = match layer.activation {
                Activation::Identity => acc,
                Activation::Relu => acc.max(0.0),
                Activation::LeakyRelu(s) => if acc > 0.0 { acc } else { s * acc },
                Activation::Tanh => acc.tanh(),
                Activation::Sigmoid => 1.0 / (1.0 + (-acc).exp()),
            };
        }
        h = next;
    }
    h
}

#[test]
fn mlp_forward_matches_nested_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (spec, seed) in [
        (build_mlp_generator(3, &[7, 5], 2, true).unwrap(), 1),
        (build_mlp_generator(2, &[4], 3, false).unwrap(), 2),
        (build_mlp_feature_extractor(4, &[6, 6], 3).unwrap(), 3),
    ] {
        let mut store = ParamStore::new();
        let net = Mlp::new(spec, "N.", &mut store, &mut ChaCha8Rng::seed_from_u64(seed), true).unwrap();
        let n = 5;
        let x = Tensor::from_fn(&[n, net.input_dim()], |_| rng.random_range(-2.0..2.0));
        let y = net.forward_value(&store, &x).unwrap();
        for r in 0..n {
            let want = manual_forward(&net, &store, x.row(r));
            for (a, b) in y.row(r).iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn init_bounds_follow_fan_in() {
    let mut store = ParamStore::<f64>::new();
    let spec = build_mlp_generator(16, &[64], 4, false).unwrap();
    let net = Mlp::new(spec, "G.", &mut store, &mut ChaCha8Rng::seed_from_u64(0), true).unwrap();
    for ((w, b), layer) in net.layer_params().iter().zip(net.spec().layers()) {
        let bound = 1.0 / (layer.input as f64).sqrt();
        for v in store.value(*w).data().iter().chain(store.value(*b).data()) {
            assert!(v.abs() <= bound);
        }
    }
}

#[test]
fn head_gradient_identity() {
    let dev = common::rf_identity::max_deviation(30, 1);
    assert!(dev < 1e-10, "max deviation {dev}");
}

#[test]
fn named_feeds_roundtrip() {
    let mut store = ParamStore::<f64>::new();
    let spec = build_mlp_generator(2, &[3], 2, false).unwrap();
    let net = Mlp::new(spec, "G.", &mut store, &mut ChaCha8Rng::seed_from_u64(0), true).unwrap();
    let x = Tensor::from_fn(&[4, 2], |i| i as f64 * 0.1);
    let out = net.run(&store, &Feeds::from([("x".to_string(), x.clone())])).unwrap();
    assert_eq!(out["y"], net.forward_value(&store, &x).unwrap());
    assert!(net.run(&store, &Feeds::from([("z".to_string(), x.clone())])).is_err());
    let bad = Tensor::from_fn(&[4, 3], |_| 0.0);
    assert!(net.run(&store, &Feeds::from([("x".to_string(), bad)])).is_err());
}

#[test]
fn disc_outputs_and_baseline_reduction() {
    let arch = Architecture { d_hidden: vec![6], g_hidden: vec![5], d1: 3, d2: 4, ..Architecture::ring() };
    let rng = ExperimentRng::new(9);
    let mut es = ParamStore::<f64>::new();
    let enc = Mlp::new(arch.encoder().unwrap(), ENCODER_PREFIX, &mut es, &mut rng.stream("e"), false).unwrap();
    let rf = GanModel::new(&arch, Some((&es, &enc)), &rng).unwrap();
    let base = GanModel::new(&arch, None, &rng).unwrap();
    let x = Tensor::from_fn(&[6, 2], |i| (i as f64 * 0.7).cos());
    let feeds = Feeds::from([("x".to_string(), x.clone())]);
    let out = rf.disc.run(&rf.store, &feeds).unwrap();
    assert_eq!(out["h1"].shape(), &[6, 3]);
    assert_eq!(out["h2"].shape(), &[6, 4]);
    assert!(out["y"].data().iter().all(|&y| y > 0.0 && y < 1.0));

    // same streams draw the same body, w2 and b; zeroing w1 leaves the baseline logit bit for bit
    assert_eq!(rf.store.digest("G."), base.store.digest("G."));
    assert_eq!(rf.store.digest("D."), base.store.digest("D."));
    let mut rf = rf;
    let w1 = rf.disc.w_repr.unwrap();
    rf.store.get_mut(w1).value.data_mut().fill(0.0);
    let a = rf.disc.run(&rf.store, &feeds).unwrap();
    let b = base.disc.run(&base.store, &feeds).unwrap();
    assert_eq!(a["logit"], b["logit"]);
}

#[test]
fn unfrozen_encoder_is_rejected() {
    let mut store = ParamStore::<f64>::new();
    let spec = build_mlp_feature_extractor(2, &[4], 3).unwrap();
    let enc = Mlp::new(spec, ENCODER_PREFIX, &mut store, &mut ChaCha8Rng::seed_from_u64(0), true).unwrap();
    let body = build_mlp_feature_extractor(2, &[4], 3).unwrap();
    assert!(RfDiscriminator::new(body, Some(enc), &mut store, &ExperimentRng::new(0)).is_err());
}
