//! Direct 2-D (non-separable, two-pass variance) SSIM used as an oracle.

const K1: f64 = 0.01;
const K2: f64 = 0.03;
const WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

pub struct Img {
    pub h: usize,
    pub w: usize,
    pub px: Vec<f64>,
}

fn gauss(d: isize) -> f64 {
    (-((d * d) as f64) / (2.0 * 1.5 * 1.5)).exp()
}

/// Mean SSIM and mean cs over all pixels, window clipped at the border and renormalized.
fn scale_terms(a: &Img, b: &Img) -> (f64, f64) {
    let (h, w) = (a.h as isize, a.w as isize);
    let c1 = K1 * K1;
    let c2 = K2 * K2;
    let (mut s_sum, mut cs_sum) = (0.0, 0.0);
    for r in 0..h {
        for c in 0..w {
            let mut cells = Vec::new();
            for dr in -5..=5isize {
                for dc in -5..=5isize {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr >= 0 && rr < h && cc >= 0 && cc < w {
                        let i = (rr * w + cc) as usize;
                        cells.push((gauss(dr) * gauss(dc), a.px[i], b.px[i]));
                    }
                }
            }
            let total: f64 = cells.iter().map(|t| t.0).sum();
            let mx: f64 = cells.iter().map(|t| t.0 * t.1).sum::<f64>() / total;
            let my: f64 = cells.iter().map(|t| t.0 * t.2).sum::<f64>() / total;
            let vx: f64 = cells.iter().map(|t| t.0 * (t.1 - mx).powi(2)).sum::<f64>() / total;
            let vy: f64 = cells.iter().map(|t| t.0 * (t.2 - my).powi(2)).sum::<f64>() / total;
            let cxy: f64 = cells.iter().map(|t| t.0 * (t.1 - mx) * (t.2 - my)).sum::<f64>() / total;
            let l = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
            let cs = (2.0 * cxy + c2) / (vx + vy + c2);
            s_sum += l * cs;
            cs_sum += cs;
        }
    }
    let n = (a.h * a.w) as f64;
    (s_sum / n, cs_sum / n)
}

fn pool(x: &Img) -> Img {
    let (h, w) = (x.h / 2, x.w / 2);
    let mut px = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let at = |rr: usize, cc: usize| x.px[rr * x.w + cc];
            px.push((at(2 * r, 2 * c) + at(2 * r, 2 * c + 1) + at(2 * r + 1, 2 * c) + at(2 * r + 1, 2 * c + 1)) / 4.0);
        }
    }
    Img { h, w, px }
}

pub fn ssim(a: &Img, b: &Img) -> f64 {
    scale_terms(a, b).0
}

pub fn ms_ssim(a: &Img, b: &Img, levels: usize) -> f64 {
    // the published weights sum to 1.0001; only truncated sets are renormalized
    let total: f64 = if levels == 5 { 1.0 } else { WEIGHTS[..levels].iter().sum() };
    let mut x = Img { h: a.h, w: a.w, px: a.px.clone() };
    let mut y = Img { h: b.h, w: b.w, px: b.px.clone() };
    let mut out = 1.0;
    for j in 0..levels {
        let wgt = WEIGHTS[j] / total;
        let (s, cs) = scale_terms(&x, &y);
        if j + 1 == levels {
            out *= s.max(0.0).powf(wgt);
        } else {
            out *= cs.max(0.0).powf(wgt);
            x = pool(&x);
            y = pool(&y);
        }
    }
    out
}
