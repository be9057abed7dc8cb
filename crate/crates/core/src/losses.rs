//! Adversarial objectives and gradient penalties.
//!
//! Two routes are provided for every loss. [`d_loss`] and [`g_loss`] act on
//! per-sample discriminator outputs (probabilities for the log losses, raw
//! scores otherwise) and clamp probabilities to `[1e-7, 1 - 1e-7]`.
//! [`d_loss_node`] and [`g_loss_node`] build the same objectives inside a
//! [`Graph`] from head logits, using `ln σ(a)` directly so training never
//! sees a clamped (zero) gradient.

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::autodiff::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

pub const LOG_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Minimax,
    NonSaturating,
    LeastSquares,
    Wasserstein,
}

impl LossKind {
    /// Whether outputs are read as probabilities through a sigmoid.
    pub fn uses_sigmoid(self) -> bool {
        matches!(self, LossKind::Minimax | LossKind::NonSaturating)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    None,
    WganGp(f64),
    Dragan(f64),
}

impl Penalty {
    pub fn lambda(self) -> Option<f64> {
        match self {
            Penalty::None => None,
            Penalty::WganGp(l) | Penalty::Dragan(l) => Some(l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub kind: LossKind,
    pub penalty: Penalty,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            kind: LossKind::NonSaturating,
            penalty: Penalty::None,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.penalty.lambda() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("penalty coefficient must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn probabilities(xs: &[f64], which: &str) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::invalid(format!("empty {which} batch")));
    }
    xs.iter()
        .map(|&y| {
            if y > 0.0 && y < 1.0 {
                Ok(y.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP))
            } else {
                Err(Error::invalid(format!("{which} output {y} outside (0, 1)")))
            }
        })
        .collect()
}

fn raw(xs: &[f64], which: &str) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::invalid(format!("empty {which} batch")));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("{which} outputs")));
    }
    Ok(())
}

/// Discriminator loss, averaged over each batch.
pub fn d_loss(kind: LossKind, real: &[f64], fake: &[f64]) -> Result<f64> {
    match kind {
        LossKind::Minimax | LossKind::NonSaturating => {
            let r = probabilities(real, "real")?;
            let f = probabilities(fake, "fake")?;
            let lr: Vec<f64> = r.iter().map(|y| -y.ln()).collect();
            let lf: Vec<f64> = f.iter().map(|y| -(1.0 - y).ln()).collect();
            Ok(mean(&lr) + mean(&lf))
        }
        LossKind::LeastSquares => {
            raw(real, "real")?;
            raw(fake, "fake")?;
            let lr: Vec<f64> = real.iter().map(|d| (d - 1.0) * (d - 1.0)).collect();
            let lf: Vec<f64> = fake.iter().map(|d| d * d).collect();
            Ok(0.5 * mean(&lr) + 0.5 * mean(&lf))
        }
        LossKind::Wasserstein => {
            raw(real, "real")?;
            raw(fake, "fake")?;
            Ok(mean(fake) - mean(real))
        }
    }
}

/// Generator loss over discriminator outputs on generated samples.
pub fn g_loss(kind: LossKind, fake: &[f64]) -> Result<f64> {
    match kind {
        LossKind::Minimax => {
            let f = probabilities(fake, "fake")?;
            Ok(mean(&f.iter().map(|y| (1.0 - y).ln()).collect::<Vec<_>>()))
        }
        LossKind::NonSaturating => {
            let f = probabilities(fake, "fake")?;
            Ok(-0.5 * mean(&f.iter().map(|y| y.ln()).collect::<Vec<_>>()))
        }
        LossKind::LeastSquares => {
            raw(fake, "fake")?;
            Ok(0.5 * mean(&fake.iter().map(|d| (d - 1.0) * (d - 1.0)).collect::<Vec<_>>()))
        }
        LossKind::Wasserstein => {
            raw(fake, "fake")?;
            Ok(-mean(fake))
        }
    }
}

/// Graph discriminator loss from `[n, 1]` logits.
pub fn d_loss_node<T: Scalar>(g: &mut Graph<T>, kind: LossKind, real: NodeId, fake: NodeId) -> Result<NodeId> {
    match kind {
        LossKind::Minimax | LossKind::NonSaturating => {
            // -ln σ(a_r) - ln(1 - σ(a_f)) = -ln σ(a_r) - ln σ(-a_f)
            let lr = g.log_sigmoid(real);
            let mr = g.mean(lr);
            let nf = g.neg(fake);
            let lf = g.log_sigmoid(nf);
            let mf = g.mean(lf);
            let s = g.add(mr, mf)?;
            Ok(g.neg(s))
        }
        LossKind::LeastSquares => {
            let r1 = g.add_scalar(real, -1.0);
            let r2 = g.square(r1);
            let mr = g.mean(r2);
            let f2 = g.square(fake);
            let mf = g.mean(f2);
            let s = g.add(mr, mf)?;
            Ok(g.scale(s, 0.5))
        }
        LossKind::Wasserstein => {
            let mr = g.mean(real);
            let mf = g.mean(fake);
            g.sub(mf, mr)
        }
    }
}

/// Graph generator loss from `[n, 1]` logits on generated samples.
pub fn g_loss_node<T: Scalar>(g: &mut Graph<T>, kind: LossKind, fake: NodeId) -> Result<NodeId> {
    Ok(match kind {
        LossKind::Minimax => {
            let nf = g.neg(fake);
            let l = g.log_sigmoid(nf);
            g.mean(l)
        }
        LossKind::NonSaturating => {
            let l = g.log_sigmoid(fake);
            let m = g.mean(l);
            g.scale(m, -0.5)
        }
        LossKind::LeastSquares => {
            let f1 = g.add_scalar(fake, -1.0);
            let f2 = g.square(f1);
            let m = g.mean(f2);
            g.scale(m, 0.5)
        }
        LossKind::Wasserstein => {
            let m = g.mean(fake);
            g.neg(m)
        }
    })
}

/// Points at which the penalty evaluates the critic's input gradient.
///
/// WGAN-GP: `ε·real + (1-ε)·fake`, one `ε ~ U(0,1)` per sample.
/// DRAGAN: `real + 0.5·std(real)·u`, `u ~ U(-1,1)` per element, `std` over the whole batch.
pub fn penalty_points<T: Scalar>(
    penalty: Penalty,
    real: &Tensor<T>,
    fake: &Tensor<T>,
    rng: &mut impl Rng,
) -> Result<Tensor<T>> {
    if real.shape() != fake.shape() {
        return Err(Error::shape("gradient_penalty", real.shape(), fake.shape()));
    }
    let (n, m) = real.dims2()?;
    if n == 0 || m == 0 {
        return Err(Error::invalid("gradient penalty on an empty batch"));
    }
    match penalty {
        Penalty::None => Err(Error::invalid("no penalty configured")),
        Penalty::WganGp(_) => {
            let eps = Uniform::new(0.0, 1.0).unwrap();
            let mut data = Vec::with_capacity(n * m);
            for r in 0..n {
                let e = T::of(eps.sample(rng));
                for (&a, &b) in real.row(r).iter().zip(fake.row(r)) {
                    data.push(e * a + (T::one() - e) * b);
                }
            }
            Tensor::new(vec![n, m], data)
        }
        Penalty::Dragan(_) => {
            let mean = real.data().iter().map(|x| x.f64()).sum::<f64>() / real.len() as f64;
            let var = real.data().iter().map(|x| (x.f64() - mean).powi(2)).sum::<f64>() / real.len() as f64;
            let scale = 0.5 * var.sqrt();
            let u = Uniform::new(-1.0, 1.0).unwrap();
            Ok(real.map(|x| x + T::of(scale * u.sample(rng))))
        }
    }
}

/// `λ·mean((‖∇ₓ critic(x)‖₂ - 1)²)` over the rows of `points`, as a graph node.
///
/// `critic` maps an `[n, d]` node to per-sample `[n, 1]` scores. The result is
/// differentiable with respect to the critic's parameters.
pub fn penalty_at<T: Scalar>(
    g: &mut Graph<T>,
    lambda: f64,
    points: Tensor<T>,
    critic: &mut dyn FnMut(&mut Graph<T>, NodeId) -> Result<NodeId>,
) -> Result<NodeId> {
    let x = g.constant(points);
    let scores = critic(g, x)?;
    // samples are independent, so d(sum)/dx_i = grad of critic at x_i
    let total = g.sum(scores);
    let grad = g.grad(total, &[x])?[0];
    let sq = g.square(grad);
    let sumsq = g.sum_cols(sq)?;
    let norm = g.sqrt(sumsq);
    let dev = g.add_scalar(norm, -1.0);
    let dev2 = g.square(dev);
    let m = g.mean(dev2);
    Ok(g.scale(m, lambda))
}

/// Full gradient penalty: sample points per `penalty`, then [`penalty_at`].
pub fn gradient_penalty<T: Scalar>(
    g: &mut Graph<T>,
    penalty: Penalty,
    critic: &mut dyn FnMut(&mut Graph<T>, NodeId) -> Result<NodeId>,
    real: &Tensor<T>,
    fake: &Tensor<T>,
    rng: &mut impl Rng,
) -> Result<NodeId> {
    let lambda = penalty
        .lambda()
        .ok_or_else(|| Error::invalid("no penalty configured"))?;
    let points = penalty_points(penalty, real, fake, rng)?;
    penalty_at(g, lambda, points, critic)
}
