use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// Affine map of `[lo, hi]` onto `[-1, 1]`.
pub fn normalize_unit_range<T: Scalar>(x: &Tensor<T>, lo: f64, hi: f64) -> Result<Tensor<T>> {
    if !(hi > lo) {
        return Err(Error::invalid(format!("normalization range [{lo}, {hi}] is empty")));
    }
    let scale = 2.0 / (hi - lo);
    Ok(x.map(|v| T::of((v.f64() - lo) * scale - 1.0)))
}

/// Inverse of [`normalize_unit_range`].
pub fn denormalize_unit_range<T: Scalar>(x: &Tensor<T>, lo: f64, hi: f64) -> Result<Tensor<T>> {
    if !(hi > lo) {
        return Err(Error::invalid(format!("normalization range [{lo}, {hi}] is empty")));
    }
    let half = (hi - lo) / 2.0;
    Ok(x.map(|v| T::of((v.f64() + 1.0) * half + lo)))
}

/// `x + N(0, noise_std²)` elementwise.
pub fn corrupt<T: Scalar>(x: &Tensor<T>, noise_std: f64, rng: &mut impl Rng) -> Result<Tensor<T>> {
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::invalid(format!("noise_std must be >= 0, got {noise_std}")));
    }
    if noise_std == 0.0 {
        return Ok(x.clone());
    }
    Ok(x.map(|v| {
        let e: f64 = StandardNormal.sample(rng);
        v + T::of(noise_std * e)
    }))
}
