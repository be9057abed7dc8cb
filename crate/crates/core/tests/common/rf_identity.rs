//! Closed-form head gradients: d(-ln Y)/dwᵢ = (Y-1)·hᵢ and d(-ln(1-Y))/dwᵢ = Y·hᵢ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfgan::autodiff::{ExperimentRng, Graph, ParamStore};
use rfgan::networks::{build_mlp_feature_extractor, Mlp, RfDiscriminator, ENCODER_PREFIX};
use rfgan::Tensor;

/// Largest absolute deviation over `instances` random single-sample discriminators.
pub fn max_deviation(instances: u64, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(i));
        let d = rng.random_range(1..=4);
        let hidden = vec![rng.random_range(2..=8)];
        let (d1, d2) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let erng = ExperimentRng::new(rng.random());
        let mut store = ParamStore::<f64>::new();
        let enc_spec = build_mlp_feature_extractor(d, &hidden, d1).unwrap();
        let enc = Mlp::new(enc_spec, ENCODER_PREFIX, &mut store, &mut erng.stream("enc"), false).unwrap();
        let body = build_mlp_feature_extractor(d, &hidden, d2).unwrap();
        let disc = RfDiscriminator::new(body, Some(enc), &mut store, &erng).unwrap();
        let x = Tensor::from_fn(&[1, d], |_| rng.random_range(-2.0..2.0));

        for fake in [false, true] {
            store.zero_grads();
            let mut g = Graph::new();
            let xn = g.constant(x.clone());
            let out = disc.forward(&mut g, &store, xn).unwrap();
            let arg = if fake { g.neg(out.logit) } else { out.logit };
            let ls = g.log_sigmoid(arg);
            let s = g.sum(ls);
            let loss = g.neg(s);
            g.backward(loss, &mut store).unwrap();

            let y = 1.0 / (1.0 + (-g.value(out.logit).data()[0]).exp());
            let coef = if fake { y } else { y - 1.0 };
            let h1 = g.value(out.h1.unwrap()).data().to_vec();
            let h2 = g.value(out.h2).data().to_vec();
            for (w, h) in [(disc.w_repr.unwrap(), &h1), (disc.w_disc, &h2)] {
                for (gv, hv) in store.get(w).grad.data().iter().zip(h) {
                    worst = worst.max((gv - coef * hv).abs());
                }
            }
            // bias: coefficient times one
            worst = worst.max((store.get(disc.bias).grad.data()[0] - coef).abs());
            // the frozen encoder never receives a gradient
            for id in disc.encoder.as_ref().unwrap().param_ids() {
                assert!(store.get(id).grad.data().iter().all(|&v| v == 0.0));
            }
        }
    }
    worst
}
