//! Centered fourth-order finite differences over flat real coordinates.

use crate::error::Result;
use num_complex::Complex64;

/// d/dx_i with the five-point stencil.
pub fn derivative<F>(f: &F, x: &[f64], i: usize, h: f64) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let mut y = x.to_vec();
    let mut at = |s: f64| {
        y[i] = x[i] + s * h;
        f(&y)
    };
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
}

/// d^2/dx_i^2 given f(x) already evaluated.
pub fn second_derivative<F>(f: &F, x: &[f64], f0: Complex64, i: usize, h: f64) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let mut y = x.to_vec();
    let mut at = |s: f64| {
        y[i] = x[i] + s * h;
        f(&y)
    };
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    Ok((-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h))
}

/// First and second derivative along x_i from one five-point stencil.
pub fn first_and_second<F>(f: &F, x: &[f64], f0: Complex64, i: usize, h: f64) -> Result<(Complex64, Complex64)>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let mut y = x.to_vec();
    let mut at = |s: f64| {
        y[i] = x[i] + s * h;
        f(&y)
    };
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h);
    Ok((d1, d2))
}

/// Gradient with one step per coordinate.
pub fn gradient<F>(f: &F, x: &[f64], h: &[f64]) -> Result<Vec<Complex64>>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    (0..x.len()).map(|i| derivative(f, x, i, h[i])).collect()
}

/// Laplacian with one step per coordinate.
pub fn laplacian<F>(f: &F, x: &[f64], h: &[f64]) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let f0 = f(x)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        sum += second_derivative(f, x, f0, i, h[i])?;
    }
    Ok(sum)
}

/// Second-order central difference, used where a cheap consistency check
/// against an analytic derivative is wanted.
pub fn central<F>(f: &F, x: &[f64], i: usize, h: f64) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let mut y = x.to_vec();
    y[i] = x[i] + h;
    let p = f(&y)?;
    y[i] = x[i] - h;
    let m = f(&y)?;
    Ok((p - m) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        // five-point stencils are exact on polynomials of degree <= 4
        let f = |x: &[f64]| -> Result<Complex64> {
            Ok(Complex64::new(
                x[0].powi(4) + 3.0 * x[0] * x[1] - x[1].powi(3),
                x[1] * x[1],
            ))
        };
        let x = [0.7, -1.3];
        let g = gradient(&f, &x, &[0.1, 0.1]).unwrap();
        assert!((g[0] - Complex64::new(4.0 * 0.343 + 3.0 * -1.3, 0.0)).norm() < 1e-12);
        assert!((g[1] - Complex64::new(3.0 * 0.7 - 3.0 * 1.69, -2.6)).norm() < 1e-12);
        let l = laplacian(&f, &x, &[0.1, 0.2]).unwrap();
        assert!((l - Complex64::new(12.0 * 0.49 + 6.0 * 1.3, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn quadratic_norm_laplacian() {
        // |X|^2 in d dimensions has Laplacian 2d
        let f = |x: &[f64]| -> Result<Complex64> { Ok(x.iter().map(|v| v * v).sum::<f64>().into()) };
        let x = [1.0, 2.0, -3.0, 0.5, 0.25, 4.0];
        let l = laplacian(&f, &x, &[0.3; 6]).unwrap();
        assert!((l.re - 12.0).abs() < 1e-11);
    }

    #[test]
    fn fourth_order_convergence() {
        let f = |x: &[f64]| -> Result<Complex64> { Ok(Complex64::new(0.0, x[0]).exp()) };
        let exact = -Complex64::new(0.0, 1.0).exp();
        let e1 = (laplacian(&f, &[1.0], &[0.2]).unwrap() - exact).norm();
        let e2 = (laplacian(&f, &[1.0], &[0.1]).unwrap() - exact).norm();
        assert!((14.0..18.0).contains(&(e1 / e2)));
    }
}
