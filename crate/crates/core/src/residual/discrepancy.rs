//! S = (H - E) Psi for the cluster ansatz.
//!
//! Writing Psi = e^{i <Q_0, X_0>} prod_j chi_j * G, with G the product of
//! the modified cross factors,
//!
//!   S / Psi = -Laplacian G / G - 2i <Q_0, grad_{X_0} G> / G
//!             - 2 sum_j <grad_{Y_j} ln chi_j, grad_{Y_j} G> / G
//!             + sum_j (-Laplacian chi_j / chi_j - |P_j|^2) + V.
//!
//! Only G is differentiated numerically. Differencing Psi itself at
//! R ~ 1e4 loses everything to the rounding of the plane-wave phase.

use super::hamiltonian::StepPolicy;
use crate::ansatz::{AnsatzModel, Flags};
use crate::error::Result;
use crate::fd;
use crate::vec3::{flatten, unflatten, R3};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discrepancy {
    pub s_over_psi: Complex64,
    pub psi: Complex64,
    /// Full potential sum a0 / |x_alpha|.
    pub potential: f64,
    /// Potential of the cross pairs only.
    pub cross_potential: f64,
    pub flags: Flags,
    pub h_z: f64,
    pub h_y: f64,
}

impl Discrepancy {
    pub fn s(&self) -> Complex64 {
        self.s_over_psi * self.psi
    }
}

/// Size of the separating block of X.
pub fn separation(model: &AnsatzModel, x: &[R3]) -> f64 {
    model.basis().z_rows().map(|k| x[k].norm_squared()).sum::<f64>().sqrt()
}

pub fn cross_potential(model: &AnsatzModel, x: &[R3]) -> f64 {
    let a0 = model.basis().system().a0();
    let cm = model.basis().coefficients();
    cm.cross().map(|a| a0 / cm.combine(a, x).norm()).sum()
}

pub fn discrepancy(model: &AnsatzModel, x: &[R3], steps: &StepPolicy) -> Result<Discrepancy> {
    let basis = model.basis();
    let q = model.momenta();
    let q_norm = model.energy().sqrt();
    let h_z = steps.z_step(separation(model, x), q_norm)?;
    let h_y = steps.cluster_step;
    steps.guard_split(basis, x, h_y, h_z)?;

    let value = model.evaluate(x)?;
    let u0 = model.u_all(x)?;
    let g0 = model.envelope_with_u(&u0, x)?;
    let flat = flatten(x);
    // u depends on Y only, so separating-coordinate shifts reuse it
    let along_z = |f: &[f64]| model.envelope_with_u(&u0, &unflatten(f));
    let along_y = |f: &[f64]| model.envelope(&unflatten(f));

    let mut lap = Complex64::new(0.0, 0.0);
    let mut drift = Complex64::new(0.0, 0.0);
    for k in basis.z_rows() {
        for c in 0..3 {
            let (d1, d2) = fd::first_and_second(&along_z, &flat, g0, 3 * k + c, h_z)?;
            lap += d2;
            drift += q[k][c] * d1;
        }
    }

    let mut cross = Complex64::new(0.0, 0.0);
    let mut cluster = Complex64::new(0.0, 0.0);
    for (j, chi) in model.chis().iter().enumerate() {
        let rows = basis.cluster_rows(j);
        let (y, p) = (&x[rows.clone()], &q[rows.clone()]);
        let v = chi.value(y, p)?;
        let grad = chi.grad_y(y, p)?;
        for (nu, k) in rows.enumerate() {
            for c in 0..3 {
                let (d1, d2) = fd::first_and_second(&along_y, &flat, g0, 3 * k + c, h_y)?;
                lap += d2;
                cross += grad[nu][c] / v * d1;
            }
        }
        let e_j: f64 = p.iter().map(|v| v.norm_squared()).sum();
        cluster += -chi.laplacian_y(y, p)? / v - e_j;
    }

    let potential = basis.potential(x);
    let s_over_psi = (-lap - 2.0 * I * drift - 2.0 * cross) / g0 + cluster + potential;
    Ok(Discrepancy {
        s_over_psi,
        psi: value.psi,
        potential,
        cross_potential: cross_potential(model, x),
        flags: value.flags,
        h_z,
        h_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzSettings;
    use crate::cluster::Realization;
    use crate::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
    use crate::residual::hamiltonian::apply_hamiltonian;

    fn model(n: usize, clusters: Vec<Vec<usize>>, q: Vec<R3>) -> AnsatzModel {
        let sys = ParticleSystem::new(n, 1.0).unwrap();
        let d = ClusterDecomposition::new(n, clusters).unwrap();
        let b = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d)).unwrap();
        let chis = d
            .clusters()
            .iter()
            .map(|c| Realization::default_for(c.len()).build(c.len(), 1.0).unwrap())
            .collect();
        AnsatzModel::new(b, chis, q, AnsatzSettings::default()).unwrap()
    }

    #[test]
    fn two_body_is_at_the_floor() {
        let m = model(2, vec![], vec![R3::new(0.3, 0.4, -0.6)]);
        for x in [
            R3::new(5.0, 1.0, 2.0),
            R3::new(-40.0, 3.0, 7.0),
            R3::new(300.0, -100.0, 20.0),
        ] {
            let d = discrepancy(&m, &[x], &StepPolicy::default()).unwrap();
            assert!(d.s_over_psi.norm() < 1e-8, "{x:?}: {}", d.s_over_psi);
        }
    }

    #[test]
    fn agrees_with_plain_stencil_at_moderate_distance() {
        // the factorized form against a direct stencil on Psi
        let q = vec![R3::new(0.3, 0.2, 0.5), R3::new(-0.4, 0.3, 0.2)];
        let x = vec![R3::new(1.2, -0.4, 0.7), R3::new(6.0, 4.0, -3.0)];
        for clusters in [vec![], vec![vec![0, 1]]] {
            let m = model(3, clusters, q.clone());
            let d = discrepancy(&m, &x, &StepPolicy::default()).unwrap();
            let psi = |xs: &[R3]| Ok(m.evaluate(xs)?.psi);
            let h = apply_hamiltonian(psi, m.basis(), &x, 2e-2, &StepPolicy::default()).unwrap();
            let plain = (h - m.energy() * d.psi) / d.psi;
            assert!(
                (plain - d.s_over_psi).norm() < 1e-6 * (1.0 + d.s_over_psi.norm()),
                "{plain} vs {}",
                d.s_over_psi
            );
        }
    }
}
