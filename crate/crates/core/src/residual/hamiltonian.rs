//! (-Laplacian_X + V) applied to an arbitrary wavefunction by finite
//! differences, and the step-size policy shared by all stencils.

use crate::ansatz::bbk_fully_separated;
use crate::error::{Error, Result};
use crate::fd;
use crate::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasis, JacobiBasisSpec, ParticleSystem};
use crate::vec3::{flatten, unflatten, R3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Finite-difference steps.
///
/// Along the separating coordinates the step grows with the distance,
/// h = max(floor, relative * R), but never beyond resolution / |Q| so that
/// the stencil still resolves the plane-wave oscillation. Cluster
/// coordinates stay at a fixed small step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepPolicy {
    pub floor: f64,
    pub relative: f64,
    pub resolution: f64,
    pub cluster_step: f64,
    /// Reject stencils whose reach comes within this many steps of a
    /// pair coincidence.
    pub coincidence_factor: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            floor: 1e-3,
            relative: 1e-4,
            resolution: 0.1,
            cluster_step: 2e-3,
            coincidence_factor: 10.0,
        }
    }
}

impl StepPolicy {
    /// Step along separating coordinates at distance r with total momentum
    /// |Q| = q_norm.
    pub fn z_step(&self, r: f64, q_norm: f64) -> Result<f64> {
        if !(self.floor > 0.0) || !(self.cluster_step > 0.0) {
            return Err(Error::Configuration("finite-difference steps must be positive".into()));
        }
        let h = self.floor.max(self.relative * r);
        if q_norm > 0.0 {
            let limit = self.resolution / q_norm;
            if self.floor > limit {
                return Err(Error::Configuration(format!(
                    "step floor {} violates h |Q| < {} for |Q| = {q_norm}",
                    self.floor, self.resolution
                )));
            }
            return Ok(h.min(limit));
        }
        Ok(h)
    }

    /// Fail if a stencil of reach 2h gets within the guard of a coincidence.
    pub fn guard(&self, basis: &JacobiBasis, x: &[R3], h: f64) -> Result<()> {
        let guard = self.coincidence_factor * h;
        for xa in basis.pair_vectors(x) {
            let d = xa.norm();
            if d < guard {
                return Err(Error::SingularStencil { distance: d, guard });
            }
        }
        Ok(())
    }

    /// Guard for a stencil that moves cluster coordinates by up to 2 h_y
    /// and separating ones by up to 2 h_z. Pairs inside a cluster only
    /// see the cluster step.
    pub fn guard_split(&self, basis: &JacobiBasis, x: &[R3], h_y: f64, h_z: f64) -> Result<()> {
        let cm = basis.coefficients();
        for alpha in 0..cm.len() {
            let h = if cm.is_within(alpha) { h_y } else { h_y.max(h_z) };
            let guard = self.coincidence_factor * h;
            let d = cm.combine(alpha, x).norm();
            if d < guard {
                return Err(Error::SingularStencil { distance: d, guard });
            }
        }
        Ok(())
    }
}

/// (-Laplacian + V) psi at X, Laplacian by the five-point stencil with
/// step h on each of the 3(n-1) scalar coordinates.
pub fn apply_hamiltonian<F>(psi: F, basis: &JacobiBasis, x: &[R3], h: f64, policy: &StepPolicy) -> Result<Complex64>
where
    F: Fn(&[R3]) -> Result<Complex64>,
{
    policy.guard(basis, x, h)?;
    let f = |flat: &[f64]| psi(&unflatten(flat));
    let flat = flatten(x);
    let lap = fd::laplacian(&f, &flat, &vec![h; flat.len()])?;
    let value = psi(x)?;
    Ok(-lap + basis.potential(x) * value)
}

/// One n = 2 calibration point: |(H - E) psi| / |psi| for successively
/// halved steps.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationPoint {
    pub x: R3,
    pub k: R3,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl CalibrationPoint {
    /// residual(h) / residual(h/2) for each halving.
    pub fn ratios(&self) -> Vec<f64> {
        self.residuals.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    pub points: usize,
    pub h0: f64,
    pub halvings: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            points: 20,
            h0: 0.4,
            halvings: 3,
            x_min: 3.0,
            x_max: 30.0,
            k_min: 0.5,
            k_max: 1.5,
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> R3 {
    loop {
        let v = R3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Step-halving study of the exact two-body Coulomb wave: its residual is
/// pure discretization error and falls as h^4.
pub fn calibrate_n2(a0: f64, spec: &CalibrationSpec, seed: u64) -> Result<Vec<CalibrationPoint>> {
    let sys = ParticleSystem::new(2, a0)?;
    let d = ClusterDecomposition::all_singletons(2);
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let policy = StepPolicy {
        coincidence_factor: 1.0,
        ..StepPolicy::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spec.points);
    for _ in 0..spec.points {
        let x = random_unit(&mut rng) * rng.gen_range(spec.x_min..spec.x_max);
        let k = random_unit(&mut rng) * rng.gen_range(spec.k_min..spec.k_max);
        let q = [k];
        let psi = |xs: &[R3]| Ok(bbk_fully_separated(&sys, &basis, xs, &q, 0.0)?.psi);
        let value = psi(&[x])?;
        let e = k.norm_squared();
        let mut steps = Vec::new();
        let mut residuals = Vec::new();
        for i in 0..=spec.halvings {
            let h = spec.h0 / f64::powi(2.0, i as i32);
            let hpsi = apply_hamiltonian(psi, &basis, &[x], h, &policy)?;
            steps.push(h);
            residuals.push((hpsi - e * value).norm() / value.norm());
        }
        out.push(CalibrationPoint { x, k, steps, residuals });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize, a0: f64) -> JacobiBasis {
        let sys = ParticleSystem::new(n, a0).unwrap();
        let d = ClusterDecomposition::all_singletons(n);
        build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d)).unwrap()
    }

    #[test]
    fn plane_wave_gives_potential() {
        let b = basis(3, 1.0);
        let q = [R3::new(0.3, -0.2, 0.5), R3::new(0.1, 0.4, -0.3)];
        let psi = |x: &[R3]| -> Result<Complex64> {
            let ph: f64 = x.iter().zip(&q).map(|(a, b)| a.dot(b)).sum();
            Ok(Complex64::new(0.0, ph).exp())
        };
        let x = [R3::new(3.0, 1.0, -2.0), R3::new(-1.0, 4.0, 2.5)];
        let e: f64 = q.iter().map(|v| v.norm_squared()).sum();
        let h = apply_hamiltonian(psi, &b, &x, 0.05, &StepPolicy::default()).unwrap();
        let v = psi(&x).unwrap();
        assert!((h - e * v - b.potential(&x) * v).norm() < 1e-7);
    }

    #[test]
    fn quadratic_is_exact() {
        let b = basis(4, 0.0);
        let psi = |x: &[R3]| -> Result<Complex64> { Ok(x.iter().map(|v| v.norm_squared()).sum::<f64>().into()) };
        let x = [R3::new(3.0, 1.0, -2.0), R3::new(-1.0, 4.0, 2.5), R3::new(0.5, 0.5, 9.0)];
        let h = apply_hamiltonian(psi, &b, &x, 0.3, &StepPolicy::default()).unwrap();
        assert!((h.re + 18.0).abs() < 1e-10);
    }

    #[test]
    fn coincidence_guard() {
        let b = basis(2, 1.0);
        let psi = |_: &[R3]| -> Result<Complex64> { Ok(Complex64::from(1.0)) };
        let r = apply_hamiltonian(psi, &b, &[R3::new(0.05, 0.0, 0.0)], 0.01, &StepPolicy::default());
        assert!(matches!(r, Err(Error::SingularStencil { .. })));
    }

    #[test]
    fn step_policy() {
        let p = StepPolicy::default();
        assert_eq!(p.z_step(100.0, 1.0).unwrap(), 1e-2);
        assert_eq!(p.z_step(1.0, 1.0).unwrap(), 1e-3);
        // at large distance the resolution limit wins
        assert!((p.z_step(1e4, 2.0).unwrap() - 0.05).abs() < 1e-15);
        assert!(p.z_step(10.0, 1000.0).is_err());
    }

    #[test]
    fn two_body_calibration_is_fourth_order() {
        let spec = CalibrationSpec {
            points: 5,
            ..CalibrationSpec::default()
        };
        for pt in calibrate_n2(1.0, &spec, 3).unwrap() {
            for r in pt.ratios() {
                assert!((12.0..20.0).contains(&r), "ratios {:?} at x={:?}", pt.ratios(), pt.x);
            }
        }
    }
}
