use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// Mixture of `k` isotropic Gaussians with means evenly spaced on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingSpec {
    pub k: usize,
    pub radius: f64,
    pub sigma: f64,
}

impl Default for RingSpec {
    fn default() -> Self {
        RingSpec {
            k: 8,
            radius: 2.0,
            sigma: 0.1,
        }
    }
}

impl RingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("ring needs at least one mode"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("ring sigma must be positive, got {}", self.sigma)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("ring radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    /// Mode `i` sits at angle `2πi/k`.
    pub fn means(&self) -> Vec<[f64; 2]> {
        (0..self.k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / self.k as f64;
                [self.radius * a.cos(), self.radius * a.sin()]
            })
            .collect()
    }

    /// Per-coordinate variance of the mixture (`r²/2 + σ²` for `k ≥ 3`).
    pub fn variance(&self) -> [f64; 2] {
        let means = self.means();
        let k = self.k as f64;
        let mut var = [0.0; 2];
        for c in 0..2 {
            let mu = means.iter().map(|m| m[c]).sum::<f64>() / k;
            var[c] = means.iter().map(|m| (m[c] - mu).powi(2)).sum::<f64>() / k + self.sigma * self.sigma;
        }
        var
    }
}

/// `n` points: uniform mode index, then `mean + N(0, σ²I)`. Returns `[n, 2]`.
pub fn sample_ring<T: Scalar>(spec: &RingSpec, n: usize, rng: &mut impl Rng) -> Result<Tensor<T>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::invalid("sample_ring needs n >= 1"));
    }
    let means = spec.means();
    let mut data = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let m = means[rng.random_range(0..spec.k)];
        let dx: f64 = StandardNormal.sample(rng);
        let dy: f64 = StandardNormal.sample(rng);
        data.push(T::of(m[0] + spec.sigma * dx));
        data.push(T::of(m[1] + spec.sigma * dy));
    }
    Tensor::new(vec![n, 2], data)
}
