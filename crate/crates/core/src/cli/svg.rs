use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Scatter plot over the fixed square `[-3, 3]²`, y axis pointing up.
pub fn scatter_svg(points: &[[f64; 2]], means: &[[f64; 2]]) -> Result<String> {
    if let Some(p) = points.iter().chain(means).find(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::NonFinite(format!("scatter point {p:?}")));
    }
    let mut s = String::new();
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-3 -3 6 6\" width=\"480\" height=\"480\">\n");
    s.push_str("<rect x=\"-3\" y=\"-3\" width=\"6\" height=\"6\" fill=\"white\"/>\n");
    s.push_str("<g fill=\"#1f77b4\" fill-opacity=\"0.4\">\n");
    for p in points {
        let _ = writeln!(s, "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"0.02\"/>", p[0], -p[1] + 0.0);
    }
    s.push_str("</g>\n<g stroke=\"#d62728\" stroke-width=\"0.025\">\n");
    for m in means {
        let (x, y) = (m[0], -m[1] + 0.0);
        let _ = writeln!(
            s,
            "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\"/><line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\"/>",
            x - 0.08, y - 0.08, x + 0.08, y + 0.08, x - 0.08, y + 0.08, x + 0.08, y - 0.08
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

pub fn emit_scatter_svg(points: &[[f64; 2]], means: &[[f64; 2]], path: &Path) -> Result<()> {
    let svg = scatter_svg(points, means)?;
    fs::write(path, svg).map_err(|e| Error::file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_points_keep_the_markers() {
        let s = scatter_svg(&[], &[[1.0, 0.5]]).unwrap();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(!s.contains("<circle"));
        assert_eq!(s.matches("<line").count(), 2);
        assert!(s.contains("y1=\"-0.5800\""));
    }

    #[test]
    fn y_is_flipped_and_output_is_stable() {
        let pts = [[0.5, 1.25], [-2.0, -0.0]];
        let a = scatter_svg(&pts, &[]).unwrap();
        assert_eq!(a, scatter_svg(&pts, &[]).unwrap());
        assert!(a.contains("cx=\"0.5000\" cy=\"-1.2500\""));
        assert!(a.contains("cx=\"-2.0000\" cy=\"0.0000\""));
        assert!(scatter_svg(&[[f64::NAN, 0.0]], &[]).is_err());
    }
}
