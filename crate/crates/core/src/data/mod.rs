//! Data sources: the Gaussian ring, IDX image corpora, normalization and
//! denoising corruption.

pub mod idx;
pub mod ring;
pub mod transform;

use rand::Rng;

pub use idx::{load_idx, load_idx_labels, write_idx_images, write_idx_labels};
pub use ring::{sample_ring, RingSpec};
pub use transform::{corrupt, denormalize_unit_range, normalize_unit_range};

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// Where real samples come from. Image rows are flattened and normalized to `[-1, 1]`.
#[derive(Debug, Clone)]
pub enum DataSource<T> {
    Ring(RingSpec),
    Images {
        rows: Tensor<T>,
        height: usize,
        width: usize,
        labels: Option<Vec<u8>>,
    },
}

impl<T: Scalar> DataSource<T> {
    /// Flatten and normalize `(n, H, W)` pixels in `0..=255`.
    pub fn from_pixels(pixels: &Tensor<f64>, labels: Option<Vec<u8>>) -> Result<Self> {
        let [n, h, w] = pixels.shape()[..] else {
            return Err(Error::shape("images", &[0, 0, 0], pixels.shape()));
        };
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::invalid(format!("{} labels for {n} images", l.len())));
            }
        }
        let rows = normalize_unit_range(pixels, 0.0, 255.0)?.reshape(&[n, h * w])?.cast();
        Ok(DataSource::Images {
            rows,
            height: h,
            width: w,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            DataSource::Ring(_) => 2,
            DataSource::Images { height, width, .. } => height * width,
        }
    }

    pub fn ring(&self) -> Option<&RingSpec> {
        match self {
            DataSource::Ring(spec) => Some(spec),
            DataSource::Images { .. } => None,
        }
    }

    pub fn image_shape(&self) -> Option<(usize, usize)> {
        match self {
            DataSource::Ring(_) => None,
            DataSource::Images { height, width, .. } => Some((*height, *width)),
        }
    }

    /// Fresh ring draws, or image rows picked uniformly with replacement.
    pub fn sample_batch(&self, n: usize, rng: &mut impl Rng) -> Result<Tensor<T>> {
        match self {
            DataSource::Ring(spec) => sample_ring(spec, n, rng),
            DataSource::Images { rows, .. } => {
                let total = rows.dims2()?.0;
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..total)).collect();
                rows.gather_rows(&idx)
            }
        }
    }

    /// A fixed training set: `ring_size` ring draws, or every image row.
    pub fn training_set(&self, ring_size: usize, rng: &mut impl Rng) -> Result<Tensor<T>> {
        match self {
            DataSource::Ring(spec) => sample_ring(spec, ring_size, rng),
            DataSource::Images { rows, .. } => Ok(rows.clone()),
        }
    }
}
