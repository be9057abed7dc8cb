//! SSIM and multi-scale SSIM on single-channel images with values in `[0, 1]`.
//!
//! Local statistics use an 11×11 Gaussian window (σ = 1.5) centred on every
//! pixel. Near the border the window is clipped to the image and its weights
//! renormalized, so every pixel contributes to the mean. Coarser scales come
//! from 2×2 mean pooling (odd trailing rows/columns are dropped).

use rand::Rng;

use crate::error::{Error, Result};

pub const WINDOW: usize = 11;
pub const WINDOW_SIGMA: f64 = 1.5;
pub const K1: f64 = 0.01;
pub const K2: f64 = 0.03;
pub const MS_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || pixels.len() != height * width {
            return Err(Error::invalid(format!(
                "{} pixels for a {height}x{width} image",
                pixels.len()
            )));
        }
        Ok(Image { height, width, pixels })
    }

    /// Map values from `[lo, hi]` to `[0, 1]`.
    pub fn from_range(height: usize, width: usize, values: &[f64], lo: f64, hi: f64) -> Result<Self> {
        let span = hi - lo;
        Self::new(height, width, values.iter().map(|v| (v - lo) / span).collect())
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.width + c]
    }

    /// 2×2 mean pooling.
    pub fn downsample(&self) -> Result<Image> {
        let (h, w) = (self.height / 2, self.width / 2);
        let mut out = Vec::with_capacity(h * w);
        for r in 0..h {
            for c in 0..w {
                let s = self.at(2 * r, 2 * c)
                    + self.at(2 * r, 2 * c + 1)
                    + self.at(2 * r + 1, 2 * c)
                    + self.at(2 * r + 1, 2 * c + 1);
                out.push(s / 4.0);
            }
        }
        Image::new(h, w, out)
    }
}

/// Gaussian taps for offsets `-5..=5`.
fn taps() -> [f64; WINDOW] {
    let half = (WINDOW / 2) as f64;
    std::array::from_fn(|i| {
        let d = i as f64 - half;
        (-(d * d) / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp()
    })
}

/// Normalized 1-D filtering along rows then columns (clipped at the borders).
fn filter(src: &[f64], h: usize, w: usize, taps: &[f64; WINDOW]) -> Vec<f64> {
    let half = WINDOW / 2;
    let pass = |len: usize, get: &dyn Fn(usize) -> f64, i: usize| -> f64 {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(len - 1);
        let mut acc = 0.0;
        let mut norm = 0.0;
        for j in lo..=hi {
            let t = taps[j + half - i];
            acc += t * get(j);
            norm += t;
        }
        acc / norm
    };
    let mut tmp = vec![0.0; h * w];
    for r in 0..h {
        let row = &src[r * w..(r + 1) * w];
        for c in 0..w {
            tmp[r * w + c] = pass(w, &|j| row[j], c);
        }
    }
    let mut out = vec![0.0; h * w];
    for c in 0..w {
        for r in 0..h {
            out[r * w + c] = pass(h, &|j| tmp[j * w + c], r);
        }
    }
    out
}

/// Mean SSIM and mean contrast-structure term at one scale.
fn ssim_and_cs(a: &Image, b: &Image) -> (f64, f64) {
    let (h, w) = (a.height, a.width);
    let t = taps();
    let c1 = (K1 * 1.0).powi(2);
    let c2 = (K2 * 1.0).powi(2);
    let xx: Vec<f64> = a.pixels.iter().map(|x| x * x).collect();
    let yy: Vec<f64> = b.pixels.iter().map(|y| y * y).collect();
    let xy: Vec<f64> = a.pixels.iter().zip(&b.pixels).map(|(x, y)| x * y).collect();
    let mx = filter(&a.pixels, h, w, &t);
    let my = filter(&b.pixels, h, w, &t);
    let exx = filter(&xx, h, w, &t);
    let eyy = filter(&yy, h, w, &t);
    let exy = filter(&xy, h, w, &t);
    let mut ssim_sum = 0.0;
    let mut cs_sum = 0.0;
    for i in 0..h * w {
        let sx = exx[i] - mx[i] * mx[i];
        let sy = eyy[i] - my[i] * my[i];
        let sxy = exy[i] - mx[i] * my[i];
        let l = (2.0 * mx[i] * my[i] + c1) / (mx[i] * mx[i] + my[i] * my[i] + c1);
        let cs = (2.0 * sxy + c2) / (sx + sy + c2);
        ssim_sum += l * cs;
        cs_sum += cs;
    }
    let n = (h * w) as f64;
    (ssim_sum / n, cs_sum / n)
}

fn check_pair(a: &Image, b: &Image) -> Result<()> {
    if (a.height, a.width) != (b.height, b.width) {
        return Err(Error::shape("ssim", &[a.height, a.width], &[b.height, b.width]));
    }
    if a.height < WINDOW || a.width < WINDOW {
        return Err(Error::invalid(format!(
            "{}x{} image is smaller than the {WINDOW}x{WINDOW} window",
            a.height, a.width
        )));
    }
    Ok(())
}

/// Single-scale SSIM with dynamic range 1.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    check_pair(a, b)?;
    Ok(ssim_and_cs(a, b).0)
}

/// Multi-scale SSIM over `levels` (1..=5) dyadic scales.
///
/// `Π_{j<M} cs_j^{β_j} · ssim_M^{β_M}`; negative terms are clamped to zero
/// before exponentiation. With fewer than five levels the leading weights
/// are renormalized to sum to one.
pub fn ms_ssim(a: &Image, b: &Image, levels: usize) -> Result<f64> {
    check_pair(a, b)?;
    if !(1..=MS_WEIGHTS.len()).contains(&levels) {
        return Err(Error::invalid(format!("ms_ssim supports 1..=5 levels, got {levels}")));
    }
    let min_side = 1usize << (levels - 1);
    if a.height < min_side || a.width < min_side {
        return Err(Error::invalid(format!(
            "{}x{} image is too small for {levels} levels",
            a.height, a.width
        )));
    }
    let weights: Vec<f64> = if levels == MS_WEIGHTS.len() {
        MS_WEIGHTS.to_vec()
    } else {
        let total: f64 = MS_WEIGHTS[..levels].iter().sum();
        MS_WEIGHTS[..levels].iter().map(|w| w / total).collect()
    };
    let mut x = a.clone();
    let mut y = b.clone();
    let mut score = 1.0;
    for (level, &wgt) in weights.iter().enumerate() {
        let (s, cs) = ssim_and_cs(&x, &y);
        if level + 1 == levels {
            score *= s.max(0.0).powf(wgt);
        } else {
            score *= cs.max(0.0).powf(wgt);
            x = x.downsample()?;
            y = y.downsample()?;
        }
    }
    Ok(score)
}

/// Draw `n_pairs` index pairs `(i, j)`, `i != j`, uniformly.
pub fn draw_pairs(n_samples: usize, n_pairs: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if n_samples < 2 {
        return Err(Error::invalid("pairwise MS-SSIM needs at least two samples"));
    }
    if n_pairs == 0 {
        return Err(Error::invalid("pairwise MS-SSIM needs at least one pair"));
    }
    Ok((0..n_pairs)
        .map(|_| {
            let i = rng.random_range(0..n_samples);
            let mut j = rng.random_range(0..n_samples - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect())
}

/// Mean MS-SSIM over random distinct pairs. Lower means more diverse samples.
pub fn pairwise_ms_ssim(samples: &[Image], n_pairs: usize, levels: usize, rng: &mut impl Rng) -> Result<f64> {
    pairwise_ms_ssim_threads(samples, n_pairs, levels, rng, 1)
}

/// As [`pairwise_ms_ssim`], splitting the pairs over `threads` workers. The
/// pairs are drawn up front and summed in order, so the result does not
/// depend on `threads`.
pub fn pairwise_ms_ssim_threads(
    samples: &[Image],
    n_pairs: usize,
    levels: usize,
    rng: &mut impl Rng,
    threads: usize,
) -> Result<f64> {
    let pairs = draw_pairs(samples.len(), n_pairs, rng)?;
    let threads = threads.clamp(1, pairs.len());
    let chunk = pairs.len().div_ceil(threads);
    let scores: Vec<Result<Vec<f64>>> = std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&(i, j)| ms_ssim(&samples[i], &samples[j], levels))
                        .collect::<Result<Vec<f64>>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("ms-ssim worker panicked")).collect()
    });
    let mut total = 0.0;
    for part in scores {
        total += part?.iter().sum::<f64>();
    }
    Ok(total / n_pairs as f64)
}
