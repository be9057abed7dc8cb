use crate::error::{Error, Result};

/// Inception-style score `exp(E_x KL(p(y|x) ‖ p(y)))` over per-sample class
/// distributions from any classifier. Bounded by `[1, K]`; a result within
/// 1e-12 (relative) of an integer is reported as that integer.
pub fn proxy_classifier_score(class_probs: &[Vec<f64>]) -> Result<f64> {
    let first = class_probs
        .first()
        .ok_or_else(|| Error::invalid("no class distributions"))?;
    let k = first.len();
    if k == 0 {
        return Err(Error::invalid("zero classes"));
    }
    for (i, row) in class_probs.iter().enumerate() {
        if row.len() != k {
            return Err(Error::invalid(format!("row {i} has {} classes, expected {k}", row.len())));
        }
        if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid(format!("row {i} has a probability outside [0, 1]")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!("row {i} sums to {s}")));
        }
    }

    // running mean: exact when every row is identical
    let mut marginal = vec![0.0; k];
    for (i, row) in class_probs.iter().enumerate() {
        let n = (i + 1) as f64;
        for (m, &p) in marginal.iter_mut().zip(row) {
            *m += (p - *m) / n;
        }
    }

    let mut kl_total = 0.0;
    for row in class_probs {
        kl_total += row
            .iter()
            .zip(&marginal)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &q)| p * (p / q).ln())
            .sum::<f64>();
    }
    let score = (kl_total / class_probs.len() as f64).exp();
    // exp/ln round-off leaves degenerate cases (uniform, balanced one-hot) a few ulps off their integer value
    let nearest = score.round();
    let score = if (score - nearest).abs() <= 1e-12 * nearest { nearest } else { score };
    Ok(score.clamp(1.0, k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_rows_score_one() {
        for k in 1..12 {
            let rows = vec![vec![1.0 / k as f64; k]; 37];
            assert_eq!(proxy_classifier_score(&rows).unwrap(), 1.0);
        }
    }

    #[test]
    fn invalid_rows() {
        assert!(proxy_classifier_score(&[]).is_err());
        assert!(proxy_classifier_score(&[vec![0.5, 0.6]]).is_err());
        assert!(proxy_classifier_score(&[vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(proxy_classifier_score(&[vec![1.5, -0.5]]).is_err());
    }
}
