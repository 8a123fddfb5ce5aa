//! The coefficient S_alpha of the slowest-decaying part of the discrepancy
//! and the cluster quantities sigma_omega it reduces to.
//!
//! For a cross pair alpha let Z be its separating part sum zeta z, K_0 the
//! matching momentum part, U_j = sum_omega zeta_{alpha omega} u_omega the
//! cluster part with y replaced by u, and b = Z^ - k^_alpha. Collecting
//! the Phi' terms of order one,
//!
//!   S_alpha = 2|k| <K_0, b> + 2 k^2 (1 - <Z^, k^>)
//!             - i|k| sum_j Laplacian_{Y_j} <b, U_j>
//!             - 2i|k| sum_j <grad_{Y_j} <b, U_j>, grad_{Y_j} ln chi_j>.
//!
//! Substituting u = -i grad_p chi / chi and k - K_0 = sum zeta p gives
//!
//!   S_alpha = -|k| sum_j sum_omega zeta_{alpha omega} sigma_omega / chi_j,
//!   sigma_omega = 2 <p_omega, b> chi + Laplacian(g / chi) chi + 2 <grad(g / chi), grad chi>,
//!
//! with g = <b, grad_{p_omega} chi>. Differentiating the cluster equation in
//! p_omega along b shows sigma_omega = 0 whenever chi solves it exactly.

use crate::ansatz::AnsatzModel;
use crate::cluster::ClusterWavefunction;
use crate::error::{Error, Result};
use crate::fd;
use crate::vec3::{cdot, complexify, flatten, unflatten, C3, R3};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default step for the Y derivatives of sigma.
pub const SIGMA_STEP: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaTerms {
    pub omega: usize,
    /// 2 <p_omega, b> chi
    pub drift: Complex64,
    /// Laplacian(g / chi) chi
    pub laplacian: Complex64,
    /// 2 <grad(g / chi), grad chi>
    pub cross: Complex64,
    pub sigma: Complex64,
    /// 2 <p, b> chi + Laplacian g - (g / chi) Laplacian chi, differenced
    /// directly from g.
    pub simplified: Complex64,
    pub chi: Complex64,
}

impl SigmaTerms {
    pub fn largest_addend(&self) -> f64 {
        self.drift.norm().max(self.laplacian.norm()).max(self.cross.norm())
    }
}

fn flat_derivatives<F>(f: &F, y: &[R3], h: f64) -> Result<(Complex64, Vec<Complex64>, Complex64)>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let x = flatten(y);
    let f0 = f(&x)?;
    let mut grad = Vec::with_capacity(x.len());
    let mut lap = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        let (d1, d2) = fd::first_and_second(f, &x, f0, i, h)?;
        grad.push(d1);
        lap += d2;
    }
    Ok((f0, grad, lap))
}

fn p_derivative(chi: &dyn ClusterWavefunction, b: &C3, omega: usize, y: &[R3], p: &[R3]) -> Result<Complex64> {
    Ok(cdot(b, &chi.grad_p(y, p)?[omega]))
}

/// sigma_omega for direction b at (Y, P), Y-derivatives by stencil of step h.
pub fn sigma_coefficient(
    chi: &dyn ClusterWavefunction,
    b: &C3,
    omega: usize,
    y: &[R3],
    p: &[R3],
    h: f64,
) -> Result<SigmaTerms> {
    if omega + 1 >= chi.size() {
        return Err(Error::Misuse(format!(
            "coordinate {omega} out of range for a cluster of {}",
            chi.size()
        )));
    }
    let value = chi.value(y, p)?;
    crate::cluster::u_vectors(chi, y, p, crate::cluster::DEFAULT_EPS_NODE)?;
    let grad_chi: Vec<Complex64> = chi.grad_y(y, p)?.iter().flat_map(|v| [v[0], v[1], v[2]]).collect();
    let lap_chi = chi.laplacian_y(y, p)?;

    let ratio = |flat: &[f64]| -> Result<Complex64> {
        let ys = unflatten(flat);
        Ok(p_derivative(chi, b, omega, &ys, p)? / chi.value(&ys, p)?)
    };
    let (f0, grad_f, lap_f) = flat_derivatives(&ratio, y, h)?;

    let g = |flat: &[f64]| p_derivative(chi, b, omega, &unflatten(flat), p);
    let (_, _, lap_g) = flat_derivatives(&g, y, h)?;

    let drift = 2.0 * cdot(&complexify(&p[omega]), b) * value;
    let laplacian = lap_f * value;
    let cross = 2.0 * grad_f.iter().zip(&grad_chi).map(|(a, c)| a * c).sum::<Complex64>();
    Ok(SigmaTerms {
        omega,
        drift,
        laplacian,
        cross,
        sigma: drift + laplacian + cross,
        simplified: drift + lap_g - f0 * lap_chi,
        chi: value,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SAlpha {
    pub pair: (usize, usize),
    /// 2|k| <K_0, b>
    pub drift: Complex64,
    /// 2 k^2 (1 - <Z^, k^>)
    pub mismatch: Complex64,
    pub laplacian: Complex64,
    pub cross: Complex64,
    /// Sum of the four terms above.
    pub direct: Complex64,
    /// -|k| sum zeta sigma / chi
    pub reduced: Complex64,
    pub sigma: Vec<SigmaTerms>,
}

impl SAlpha {
    pub fn largest_addend(&self) -> f64 {
        [self.drift, self.mismatch, self.laplacian, self.cross]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// |direct - reduced| relative to the largest addend.
    pub fn route_difference(&self) -> f64 {
        (self.direct - self.reduced).norm() / self.largest_addend().max(f64::MIN_POSITIVE)
    }
}

/// S_alpha at X for a cross pair, by both assembly routes.
pub fn s_alpha(model: &AnsatzModel, x: &[R3], alpha: usize, h: f64) -> Result<SAlpha> {
    let basis = model.basis();
    let cm = basis.coefficients();
    let (i, j) = cm.pair(alpha);
    if cm.is_within(alpha) {
        return Err(Error::Misuse(format!(
            "pair ({}, {}) is inside a cluster",
            i + 1,
            j + 1
        )));
    }
    let q = model.momenta();
    let mut z_sum = R3::zeros();
    let mut k0 = R3::zeros();
    let mut weight = 0.0;
    for k in basis.z_rows() {
        let zeta = cm.get(alpha, k);
        z_sum += x[k] * zeta;
        k0 += q[k] * zeta;
        weight += zeta * zeta;
    }
    if weight == 0.0 || z_sum.norm() == 0.0 {
        return Err(Error::DegeneratePair(i + 1, j + 1));
    }
    let k = cm.combine(alpha, q);
    let kn = k.norm();
    if kn == 0.0 {
        return Err(Error::SingularMomentum(kn));
    }
    let zh = z_sum / z_sum.norm();
    let kh = k / kn;
    let b_real = zh - kh;
    let b = complexify(&b_real);

    let drift = Complex64::from(2.0 * kn * k0.dot(&b_real));
    let mismatch = Complex64::from(2.0 * kn * kn * (1.0 - zh.dot(&kh)));
    let mut laplacian = Complex64::new(0.0, 0.0);
    let mut cross = Complex64::new(0.0, 0.0);
    let mut reduced = Complex64::new(0.0, 0.0);
    let mut sigma = Vec::new();

    for (c, chi) in model.chis().iter().enumerate() {
        let rows = basis.cluster_rows(c);
        let (y, p) = (&x[rows.clone()], &q[rows.clone()]);
        let zetas: Vec<f64> = rows.clone().map(|r| cm.get(alpha, r)).collect();
        if zetas.iter().all(|z| *z == 0.0) {
            continue;
        }
        let value = chi.value(y, p)?;
        let dlog: Vec<Complex64> = chi
            .grad_y(y, p)?
            .iter()
            .flat_map(|v| [v[0] / value, v[1] / value, v[2] / value])
            .collect();

        // <b, U_j> with U_j = sum zeta u, u = -i grad_p chi / chi
        let bu = |flat: &[f64]| -> Result<Complex64> {
            let ys = unflatten(flat);
            let v = chi.value(&ys, p)?;
            let gp = chi.grad_p(&ys, p)?;
            Ok(zetas.iter().zip(&gp).map(|(z, g)| -I * *z * cdot(&b, g) / v).sum())
        };
        let (_, grad_bu, lap_bu) = flat_derivatives(&bu, y, h)?;
        laplacian += -I * kn * lap_bu;
        cross += -2.0 * I * kn * grad_bu.iter().zip(&dlog).map(|(a, d)| a * d).sum::<Complex64>();

        for (omega, z) in zetas.iter().enumerate() {
            let terms = sigma_coefficient(chi.as_ref(), &b, omega, y, p, h)?;
            reduced += -kn * *z * terms.sigma / value;
            sigma.push(terms);
        }
    }

    Ok(SAlpha {
        pair: (i, j),
        drift,
        mismatch,
        laplacian,
        cross,
        direct: drift + mismatch + laplacian + cross,
        reduced,
        sigma,
    })
}
