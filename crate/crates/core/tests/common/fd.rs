//! Central-difference checks for every graph primitive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfgan::autodiff::{Graph, NodeId};
use rfgan::{Result, Tensor};

pub type Build = fn(&mut Graph<f64>, &[NodeId]) -> Result<NodeId>;
pub type Inputs = fn(&mut ChaCha8Rng) -> Vec<Tensor<f64>>;

pub struct OpCase {
    pub name: &'static str,
    pub inputs: Inputs,
    pub build: Build,
}

pub const REL_TOL: f64 = 1e-4;

fn uniform(rng: &mut ChaCha8Rng, shape: &[usize], lo: f64, hi: f64) -> Tensor<f64> {
    Tensor::from_fn(shape, |_| rng.random_range(lo..hi))
}

/// Magnitudes in `[lo, hi)` with random sign.
fn away(rng: &mut ChaCha8Rng, shape: &[usize], lo: f64, hi: f64) -> Tensor<f64> {
    Tensor::from_fn(shape, |_| {
        let v = rng.random_range(lo..hi);
        if rng.random::<bool>() { v } else { -v }
    })
}

fn dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.random_range(1..=4), rng.random_range(1..=5))
}

fn nm(rng: &mut ChaCha8Rng) -> Vec<Tensor<f64>> {
    let (n, m) = dims(rng);
    vec![uniform(rng, &[n, m], -2.0, 2.0)]
}

fn nm_pair(rng: &mut ChaCha8Rng) -> Vec<Tensor<f64>> {
    let (n, m) = dims(rng);
    vec![uniform(rng, &[n, m], -2.0, 2.0), uniform(rng, &[n, m], -2.0, 2.0)]
}

fn nm_quotient(rng: &mut ChaCha8Rng) -> Vec<Tensor<f64>> {
    let (n, m) = dims(rng);
    vec![uniform(rng, &[n, m], -2.0, 2.0), away(rng, &[n, m], 0.5, 2.0)]
}

fn nm_kinked(rng: &mut ChaCha8Rng) -> Vec<Tensor<f64>> {
    let (n, m) = dims(rng);
    vec![away(rng, &[n, m], 0.1, 2.0)]
}

fn nm_positive(rng: &mut ChaCha8Rng) -> Vec<Tensor<f64>> {
    let (n, m) = dims(rng);
    vec![uniform(rng, &[n, m], 0.2, 3.0)]
}

fn nm_wide(rng: &mut ChaCha8Rng) -> Vec<Tensor<f64>> {
    let n = rng.random_range(1..=4);
    let m = rng.random_range(3..=6);
    vec![uniform(rng, &[n, m], -2.0, 2.0)]
}

fn matmul_inputs(rng: &mut ChaCha8Rng, ta: bool, tb: bool) -> Vec<Tensor<f64>> {
    let (n, k, m) = (rng.random_range(1..=4), rng.random_range(1..=5), rng.random_range(1..=4));
    let a = if ta { [k, n] } else { [n, k] };
    let b = if tb { [m, k] } else { [k, m] };
    vec![uniform(rng, &a, -1.5, 1.5), uniform(rng, &b, -1.5, 1.5)]
}

pub fn cases() -> Vec<OpCase> {
    vec![
        OpCase { name: "matmul", inputs: |r| matmul_inputs(r, false, false), build: |g, x| g.matmul(x[0], x[1]) },
        OpCase { name: "matmul_ta", inputs: |r| matmul_inputs(r, true, false), build: |g, x| g.matmul_t(x[0], x[1], true, false) },
        OpCase { name: "matmul_tb", inputs: |r| matmul_inputs(r, false, true), build: |g, x| g.matmul_t(x[0], x[1], false, true) },
        OpCase { name: "matmul_tatb", inputs: |r| matmul_inputs(r, true, true), build: |g, x| g.matmul_t(x[0], x[1], true, true) },
        OpCase { name: "add", inputs: nm_pair, build: |g, x| g.add(x[0], x[1]) },
        OpCase { name: "sub", inputs: nm_pair, build: |g, x| g.sub(x[0], x[1]) },
        OpCase { name: "mul", inputs: nm_pair, build: |g, x| g.mul(x[0], x[1]) },
        OpCase { name: "div", inputs: nm_quotient, build: |g, x| g.div(x[0], x[1]) },
        OpCase { name: "safe_div", inputs: nm_quotient, build: |g, x| g.safe_div(x[0], x[1]) },
        OpCase { name: "neg", inputs: nm, build: |g, x| Ok(g.neg(x[0])) },
        OpCase { name: "scale", inputs: nm, build: |g, x| Ok(g.scale(x[0], -1.75)) },
        OpCase { name: "add_scalar", inputs: nm, build: |g, x| Ok(g.add_scalar(x[0], 0.3)) },
        OpCase {
            name: "add_row",
            inputs: |r| {
                let (n, m) = dims(r);
                vec![uniform(r, &[n, m], -2.0, 2.0), uniform(r, &[m], -2.0, 2.0)]
            },
            build: |g, x| g.add_row(x[0], x[1]),
        },
        OpCase { name: "sum_rows", inputs: nm, build: |g, x| g.sum_rows(x[0]) },
        OpCase {
            name: "broadcast_rows",
            inputs: |r| {
                let m = r.random_range(1..=5);
                vec![uniform(r, &[m], -2.0, 2.0)]
            },
            build: |g, x| g.broadcast_rows(x[0], 3),
        },
        OpCase { name: "sum_cols", inputs: nm, build: |g, x| g.sum_cols(x[0]) },
        OpCase {
            name: "broadcast_cols",
            inputs: |r| {
                let n = r.random_range(1..=4);
                vec![uniform(r, &[n, 1], -2.0, 2.0)]
            },
            build: |g, x| g.broadcast_cols(x[0], 4),
        },
        OpCase { name: "sum", inputs: nm, build: |g, x| Ok(g.sum(x[0])) },
        OpCase { name: "mean", inputs: nm, build: |g, x| Ok(g.mean(x[0])) },
        OpCase {
            name: "broadcast_scalar",
            inputs: |r| vec![Tensor::scalar(r.random_range(-2.0..2.0))],
            build: |g, x| g.broadcast_scalar(x[0], &[3, 2]),
        },
        OpCase {
            name: "reshape",
            inputs: nm,
            build: |g, x| {
                let n = g.value(x[0]).len();
                g.reshape(x[0], &[n])
            },
        },
        OpCase { name: "sigmoid", inputs: nm, build: |g, x| Ok(g.sigmoid(x[0])) },
        OpCase { name: "tanh", inputs: nm, build: |g, x| Ok(g.tanh(x[0])) },
        OpCase { name: "relu", inputs: nm_kinked, build: |g, x| Ok(g.relu(x[0])) },
        OpCase { name: "leaky_relu", inputs: nm_kinked, build: |g, x| Ok(g.leaky_relu(x[0], 0.2)) },
        OpCase { name: "log", inputs: nm_positive, build: |g, x| Ok(g.log(x[0])) },
        OpCase {
            name: "log_sigmoid",
            inputs: |r| {
                let (n, m) = dims(r);
                vec![uniform(r, &[n, m], -8.0, 8.0)]
            },
            build: |g, x| Ok(g.log_sigmoid(x[0])),
        },
        OpCase { name: "exp", inputs: nm, build: |g, x| Ok(g.exp(x[0])) },
        OpCase { name: "square", inputs: nm, build: |g, x| Ok(g.square(x[0])) },
        OpCase { name: "sqrt", inputs: nm_positive, build: |g, x| Ok(g.sqrt(x[0])) },
        OpCase {
            name: "concat",
            inputs: |r| {
                let n = r.random_range(1..=4);
                (0..3)
                    .map(|_| {
                        let w = r.random_range(1..=3);
                        uniform(r, &[n, w], -2.0, 2.0)
                    })
                    .collect()
            },
            build: |g, x| g.concat(x),
        },
        OpCase {
            name: "slice_cols",
            inputs: nm_wide,
            build: |g, x| {
                let m = g.shape(x[0])[1];
                g.slice_cols(x[0], 1, m - 1)
            },
        },
        OpCase {
            name: "pad_cols",
            inputs: nm,
            build: |g, x| {
                let m = g.shape(x[0])[1];
                g.pad_cols(x[0], 2, m + 3)
            },
        },
        OpCase { name: "log_softmax", inputs: nm, build: |g, x| g.log_softmax(x[0]) },
        OpCase {
            // input-gradient norm of a small critic, differentiated again
            name: "second_order",
            inputs: |r| {
                let (n, d) = (r.random_range(1..=4), r.random_range(1..=3));
                let h = r.random_range(1..=4);
                vec![uniform(r, &[n, d], -1.5, 1.5), uniform(r, &[d, h], -1.0, 1.0)]
            },
            build: |g, x| {
                let a = g.matmul(x[0], x[1])?;
                let t = g.tanh(a);
                let s = g.sum(t);
                let gx = g.grad(s, &[x[0]])?[0];
                let sq = g.square(gx);
                let n2 = g.sum_cols(sq)?;
                Ok(g.sqrt(n2))
            },
        },
    ]
}

/// `sum(build(inputs) ⊙ w)` and its gradients with respect to every input.
fn evaluate(case: &OpCase, inputs: &[Tensor<f64>], w: &Tensor<f64>, with_grad: bool) -> Result<(f64, Vec<Tensor<f64>>)> {
    let mut g = Graph::new();
    let ids: Vec<NodeId> = inputs.iter().map(|t| g.constant(t.clone())).collect();
    let y = (case.build)(&mut g, &ids)?;
    let wn = g.constant(w.clone());
    let prod = g.mul(y, wn)?;
    let loss = g.sum(prod);
    let value = g.value(loss).item()?;
    if !with_grad {
        return Ok((value, vec![]));
    }
    let grads = g.grad(loss, &ids)?;
    Ok((value, grads.into_iter().map(|n| g.value(n).clone()).collect()))
}

/// Largest `|analytic - numeric| / max(|analytic|, |numeric|, 1e-4)` over all input elements.
pub fn max_rel_error(case: &OpCase, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = (case.inputs)(&mut rng);
    let out_shape = {
        let mut g = Graph::new();
        let ids: Vec<NodeId> = inputs.iter().map(|t| g.constant(t.clone())).collect();
        let y = (case.build)(&mut g, &ids)?;
        g.shape(y).to_vec()
    };
    let w = if out_shape.is_empty() {
        Tensor::scalar(rng.random_range(0.5..1.5))
    } else {
        uniform(&mut rng, &out_shape, -1.0, 1.0)
    };
    let (_, analytic) = evaluate(case, &inputs, &w, true)?;
    let mut worst: f64 = 0.0;
    for (i, input) in inputs.iter().enumerate() {
        for j in 0..input.len() {
            let x = input.data()[j];
            let h = 1e-5 * x.abs().max(1.0);
            let mut shifted = inputs.to_vec();
            shifted[i].data_mut()[j] = x + h;
            let (fp, _) = evaluate(case, &shifted, &w, false)?;
            shifted[i].data_mut()[j] = x - h;
            let (fm, _) = evaluate(case, &shifted, &w, false)?;
            let numeric = (fp - fm) / (2.0 * h);
            let a = analytic[i].data()[j];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4);
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

/// Every case over `seeds`; returns `(case, seed, error)` for each failure.
pub fn run_suite(seeds: std::ops::Range<u64>) -> Vec<(&'static str, u64, String)> {
    let mut failures = Vec::new();
    for case in cases() {
        for seed in seeds.clone() {
            match max_rel_error(&case, seed) {
                Ok(e) if e <= REL_TOL => {}
                Ok(e) => failures.push((case.name, seed, format!("relative error {e:.3e}"))),
                Err(e) => failures.push((case.name, seed, e.to_string())),
            }
        }
    }
    failures
}
