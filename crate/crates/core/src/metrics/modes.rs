use serde::Serialize;

use crate::error::{Error, Result};

/// How a set of 2-D samples distributes over known mixture modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub modes_covered: usize,
    pub high_quality_fraction: f64,
    /// high-quality samples owned by each mode
    pub counts: Vec<usize>,
}

/// A sample is high quality when it lies within 3σ of its nearest mean; a
/// mode is covered when it owns at least `threshold` high-quality samples
/// (default `total / (10·K)`).
pub fn mode_coverage(samples: &[[f64; 2]], means: &[[f64; 2]], sigma: f64, threshold: Option<f64>) -> Result<ModeReport> {
    if samples.is_empty() {
        return Err(Error::invalid("mode coverage of an empty sample set"));
    }
    if means.is_empty() {
        return Err(Error::invalid("no modes given"));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    for (i, a) in means.iter().enumerate() {
        if means[..i].contains(a) {
            return Err(Error::invalid(format!("duplicate mode mean {a:?}")));
        }
    }
    let threshold = threshold.unwrap_or(samples.len() as f64 / (10.0 * means.len() as f64));
    let radius = 3.0 * sigma;
    let mut counts = vec![0usize; means.len()];
    let mut good = 0usize;
    for p in samples {
        let (best, dist) = means
            .iter()
            .enumerate()
            .map(|(i, m)| (i, ((p[0] - m[0]).powi(2) + (p[1] - m[1]).powi(2)).sqrt()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if dist <= radius {
            counts[best] += 1;
            good += 1;
        }
    }
    Ok(ModeReport {
        modes_covered: counts.iter().filter(|&&c| c as f64 >= threshold).count(),
        high_quality_fraction: good as f64 / samples.len() as f64,
        counts,
    })
}
