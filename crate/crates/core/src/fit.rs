//! Ordinary least squares for log-log decay exponents.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for two points or an exact fit.
    pub slope_se: f64,
    pub points: usize,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData { usable: n, required: 2 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData { usable: 1, required: 2 });
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
        points: n,
    })
}

/// Slope of ln|v| against ln r, skipping nothing: zero or non-finite values
/// are an error so that no point is dropped silently.
pub fn loglog(r: &[f64], v: &[f64]) -> Result<LineFit> {
    let mut lx = Vec::with_capacity(r.len());
    let mut ly = Vec::with_capacity(r.len());
    for (&a, &b) in r.iter().zip(v) {
        if !(a > 0.0 && b.abs() > 0.0 && b.is_finite()) {
            return Err(Error::Range(format!("cannot take logs of ({a:e}, {b:e})")));
        }
        lx.push(a.ln());
        ly.push(b.abs().ln());
    }
    ols(&lx, &ly)
}

/// Geometric grid of `points` values from lo to hi inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo * ratio.powi(i as i32) })
        .collect()
}
