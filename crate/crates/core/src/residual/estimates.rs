//! Remainders of the large-separation expansions of |x_alpha| and of the
//! distortion argument w_alpha for cross pairs.
//!
//! With Z the separating part of x_alpha and Y its cluster part,
//!
//!   r1 = |x_alpha| - |Z| - <Z^, Y>
//!   r2 = w_alpha - [|k||Z| - <k, Z> + |k| <Z^ - k^, Y>]
//!
//! both fall off as 1/|Z| at fixed Y.

use crate::error::{Error, Result};
use crate::fit::{loglog, LineFit};
use crate::kinematics::JacobiBasis;
use crate::vec3::R3;

/// Slope bound for both remainders.
pub const REMAINDER_SLOPE_MAX: f64 = -0.8;

#[derive(Clone, Debug, PartialEq)]
pub struct Remainder {
    pub values: Vec<f64>,
    /// None when every value is exactly zero.
    pub fit: Option<LineFit>,
}

impl Remainder {
    fn new(scales: &[f64], values: Vec<f64>) -> Result<Self> {
        if values.iter().all(|v| *v == 0.0) {
            return Ok(Self { values, fit: None });
        }
        let (s, v): (Vec<f64>, Vec<f64>) = scales
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(s, v)| (*s, v.abs()))
            .unzip();
        let fit = loglog(&s, &v)?;
        Ok(Self { values, fit: Some(fit) })
    }

    pub fn passes(&self, slope_max: f64) -> bool {
        match &self.fit {
            None => true,
            Some(f) => f.slope.is_finite() && f.slope <= slope_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairRemainders {
    pub pair: (usize, usize),
    pub first: Remainder,
    pub second: Remainder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatesReport {
    /// Size of the separating block of each sample.
    pub scales: Vec<f64>,
    pub pairs: Vec<PairRemainders>,
}

impl EstimatesReport {
    pub fn passes(&self, slope_max: f64) -> bool {
        self.pairs
            .iter()
            .all(|p| p.first.passes(slope_max) && p.second.passes(slope_max))
    }

    /// Largest fitted slope over pairs and both remainders.
    pub fn worst_slope(&self) -> Option<f64> {
        self.pairs
            .iter()
            .flat_map(|p| [&p.first.fit, &p.second.fit])
            .flatten()
            .map(|f| f.slope)
            .reduce(f64::max)
    }
}

/// r1 and r2 for cross pair alpha at X.
pub fn remainders(basis: &JacobiBasis, x: &[R3], q: &[R3], alpha: usize) -> Result<(f64, f64)> {
    let cm = basis.coefficients();
    let z: R3 = basis.z_rows().map(|k| x[k] * cm.get(alpha, k)).sum();
    let xa = cm.combine(alpha, x);
    let y = xa - z;
    let zn = z.norm();
    if zn == 0.0 {
        let (i, j) = cm.pair(alpha);
        return Err(Error::DegeneratePair(i + 1, j + 1));
    }
    let zh = z / zn;
    // |x| - |Z| without cancellation
    let excess = (2.0 * z.dot(&y) + y.norm_squared()) / (xa.norm() + zn);
    let r1 = excess - zh.dot(&y);

    let k = cm.combine(alpha, q);
    let kn = k.norm();
    let w = kn * xa.norm() - k.dot(&xa);
    let leading = kn * zn - k.dot(&z);
    let r2 = if kn == 0.0 {
        0.0
    } else {
        w - leading - kn * (zh - k / kn).dot(&y)
    };
    Ok((r1, r2))
}

/// Fits both remainders against the separation over samples along a ray.
pub fn intermediate_estimates_check(basis: &JacobiBasis, samples: &[Vec<R3>], q: &[R3]) -> Result<EstimatesReport> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData {
            usable: samples.len(),
            required: 3,
        });
    }
    let scales: Vec<f64> = samples
        .iter()
        .map(|x| basis.z_rows().map(|k| x[k].norm_squared()).sum::<f64>().sqrt())
        .collect();
    let cm = basis.coefficients();
    let mut pairs = Vec::new();
    for alpha in cm.cross() {
        let mut r1 = Vec::with_capacity(samples.len());
        let mut r2 = Vec::with_capacity(samples.len());
        for x in samples {
            let (a, b) = remainders(basis, x, q, alpha)?;
            r1.push(a);
            r2.push(b);
        }
        pairs.push(PairRemainders {
            pair: cm.pair(alpha),
            first: Remainder::new(&scales, r1)?,
            second: Remainder::new(&scales, r2)?,
        });
    }
    Ok(EstimatesReport { scales, pairs })
}
