//! Small helpers for real and complex 3-vectors.

use nalgebra::Vector3;
use num_complex::Complex64;

pub type R3 = Vector3<f64>;
pub type C3 = Vector3<Complex64>;

pub fn complexify(v: &R3) -> C3 {
    v.map(Complex64::from)
}

pub fn real_part(v: &C3) -> R3 {
    v.map(|c| c.re)
}

pub fn imag_part(v: &C3) -> R3 {
    v.map(|c| c.im)
}

/// Bilinear (non-conjugating) product of a complex and a real vector.
pub fn cdot_r(a: &C3, b: &R3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bilinear (non-conjugating) product of two complex vectors.
pub fn cdot(a: &C3, b: &C3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Holomorphic length sqrt(v.v) on the principal branch.
pub fn clength(v: &C3) -> Complex64 {
    cdot(v, v).sqrt()
}

/// Stack per-coordinate 3-vectors into one flat slice of length 3 * len.
pub fn flatten(vs: &[R3]) -> Vec<f64> {
    vs.iter().flat_map(|v| [v[0], v[1], v[2]]).collect()
}

pub fn unflatten(xs: &[f64]) -> Vec<R3> {
    debug_assert_eq!(xs.len() % 3, 0);
    xs.chunks_exact(3).map(|c| R3::new(c[0], c[1], c[2])).collect()
}

/// Complex vector times a real scalar.
pub fn cscale(v: &C3, s: f64) -> C3 {
    v.map(|c| c * s)
}
