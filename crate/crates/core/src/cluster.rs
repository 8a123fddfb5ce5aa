//! Cluster wavefunctions chi_j(Y_j, P_j) and the u-vectors
//! u_nu = -i grad_{p_nu} chi / chi that replace cluster coordinates inside
//! the cross-pair distortion factors.
//!
//! Coordinates are the cluster's internal Jacobi vectors, so an m-particle
//! cluster takes m - 1 vectors y and m - 1 momenta p, and the internal
//! Hamiltonian is -Laplacian_Y + sum a0/|x_beta| with energy |P|^2.

use crate::error::{Error, Result};
use crate::fd;
use crate::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use crate::special::{kummer_complex, sommerfeld, KummerSettings};
use crate::vec3::{cdot, complexify, flatten, unflatten, C3, R3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default relative node threshold: |chi| below this times the local
/// scale counts as a node.
pub const DEFAULT_EPS_NODE: f64 = 1e-8;

/// Step of the finite-difference fallbacks in Y.
pub const DEFAULT_FD_STEP: f64 = 2e-3;

/// Step of the eigen-equation self test.
pub const DEFAULT_SELFTEST_STEP: f64 = 5e-3;

pub trait ClusterWavefunction: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    /// Number of particles m.
    fn size(&self) -> usize;

    /// Coupling of the pair potentials this realization solves.
    fn coupling(&self) -> f64;

    fn value(&self, y: &[R3], p: &[R3]) -> Result<Complex64>;

    /// grad_{p_nu} chi for nu = 1..m-1.
    fn grad_p(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>>;

    /// grad_{y_nu} chi. Finite differences unless overridden.
    fn grad_y(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>> {
        let f = |flat: &[f64]| self.value(&unflatten(flat), p);
        let x = flatten(y);
        let g = fd::gradient(&f, &x, &vec![DEFAULT_FD_STEP; x.len()])?;
        Ok(g.chunks_exact(3).map(|c| C3::new(c[0], c[1], c[2])).collect())
    }

    /// Laplacian over all of Y. Finite differences unless overridden.
    fn laplacian_y(&self, y: &[R3], p: &[R3]) -> Result<Complex64> {
        let f = |flat: &[f64]| self.value(&unflatten(flat), p);
        let x = flatten(y);
        fd::laplacian(&f, &x, &vec![DEFAULT_FD_STEP; x.len()])
    }

    /// Typical |chi| near (Y, P), the reference for node detection.
    fn node_scale(&self, y: &[R3], p: &[R3]) -> Result<f64> {
        let mut scale = self.value(y, p)?.norm();
        let x = flatten(y);
        for i in 0..x.len() {
            for s in [-0.25, 0.25] {
                let mut z = x.clone();
                z[i] += s;
                scale = scale.max(self.value(&unflatten(&z), p)?.norm());
            }
        }
        Ok(scale)
    }

    /// Largest <x^_beta, k^_beta> over internal pairs, or -1 when the
    /// realization has no forward-cone sensitivity.
    fn forward_alignment(&self, _y: &[R3], _p: &[R3]) -> f64 {
        -1.0
    }

    /// Internal potential sum a0 / |x_beta| with this realization's coupling.
    fn potential(&self, y: &[R3]) -> f64 {
        let a0 = self.coupling();
        if a0 == 0.0 {
            return 0.0;
        }
        internal_pairs(self.size())
            .iter()
            .map(|z| a0 / combine(z, y).norm())
            .sum()
    }

    /// |(-Laplacian + V - |P|^2) chi| / |chi| with the Laplacian from a
    /// fourth-order stencil of step h, independent of any analytic
    /// derivative the realization provides.
    fn residual_selftest_with_step(&self, y: &[R3], p: &[R3], h: f64) -> Result<f64> {
        let f = |flat: &[f64]| self.value(&unflatten(flat), p);
        let x = flatten(y);
        let chi = self.value(y, p)?;
        let lap = fd::laplacian(&f, &x, &vec![h; x.len()])?;
        let e: f64 = p.iter().map(|v| v.norm_squared()).sum();
        Ok(((-lap) + (self.potential(y) - e) * chi).norm() / chi.norm())
    }

    fn residual_selftest(&self, y: &[R3], p: &[R3]) -> Result<f64> {
        self.residual_selftest_with_step(y, p, DEFAULT_SELFTEST_STEP)
    }
}

/// u_nu = -i grad_{p_nu} chi / chi
#[derive(Clone, Debug, PartialEq)]
pub struct UVectors {
    pub u: Vec<C3>,
}

/// u-vectors, refusing points where |chi| < eps_node times the local scale.
pub fn u_vectors(chi: &dyn ClusterWavefunction, y: &[R3], p: &[R3], eps_node: f64) -> Result<UVectors> {
    let value = chi.value(y, p)?;
    check_node(chi, y, p, value, eps_node)?;
    let g = chi.grad_p(y, p)?;
    Ok(UVectors {
        u: g.iter().map(|v| v.map(|c| -I * c / value)).collect(),
    })
}

fn check_node(chi: &dyn ClusterWavefunction, y: &[R3], p: &[R3], value: Complex64, eps_node: f64) -> Result<()> {
    let magnitude = value.norm();
    if !magnitude.is_finite() {
        return Err(Error::Range(format!("non-finite {} value", chi.name())));
    }
    let threshold = eps_node * chi.node_scale(y, p)?;
    if magnitude < threshold || magnitude == 0.0 {
        return Err(Error::Node {
            cluster: 0,
            magnitude,
            threshold,
        });
    }
    Ok(())
}

/// Pair coefficients of an m-particle cluster in its own Jacobi basis.
pub fn internal_pairs(m: usize) -> Vec<Vec<f64>> {
    let sys = ParticleSystem::new(m, 0.0).expect("cluster size >= 2");
    let d = ClusterDecomposition::all_singletons(m);
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d)).expect("default basis");
    let cm = basis.coefficients();
    (0..cm.len()).map(|a| cm.row(a)).collect()
}

fn combine(zeta: &[f64], vs: &[R3]) -> R3 {
    zeta.iter().zip(vs).fold(R3::zeros(), |acc, (z, v)| acc + v * *z)
}

/// sqrt(sum |x_beta|^2) over internal pairs.
pub fn cluster_hyperradius(m: usize, y: &[R3]) -> f64 {
    internal_pairs(m)
        .iter()
        .map(|z| combine(z, y).norm_squared())
        .sum::<f64>()
        .sqrt()
}

fn plane_wave(y: &[R3], p: &[R3]) -> Complex64 {
    let phase: f64 = y.iter().zip(p).map(|(a, b)| a.dot(b)).sum();
    (I * phase).exp()
}

fn check_shape(m: usize, y: &[R3], p: &[R3]) -> Result<()> {
    if y.len() != m - 1 || p.len() != m - 1 {
        return Err(Error::Misuse(format!(
            "cluster of {m} particles takes {} coordinates, got {} and {}",
            m - 1,
            y.len(),
            p.len()
        )));
    }
    Ok(())
}

/// The plane wave e^{i <P, Y>}, exact when the internal coupling vanishes.
#[derive(Clone, Debug)]
pub struct FreeCluster {
    m: usize,
}

pub fn free_cluster(m: usize) -> Result<FreeCluster> {
    if m < 2 {
        return Err(Error::Configuration(format!("cluster size {m} < 2")));
    }
    Ok(FreeCluster { m })
}

impl ClusterWavefunction for FreeCluster {
    fn name(&self) -> &'static str {
        "free"
    }

    fn size(&self) -> usize {
        self.m
    }

    fn coupling(&self) -> f64 {
        0.0
    }

    fn value(&self, y: &[R3], p: &[R3]) -> Result<Complex64> {
        check_shape(self.m, y, p)?;
        Ok(plane_wave(y, p))
    }

    fn grad_p(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>> {
        let v = self.value(y, p)?;
        Ok(y.iter().map(|yv| complexify(yv) * (I * v)).collect())
    }

    fn grad_y(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>> {
        let v = self.value(y, p)?;
        Ok(p.iter().map(|pv| complexify(pv) * (I * v)).collect())
    }

    fn laplacian_y(&self, y: &[R3], p: &[R3]) -> Result<Complex64> {
        let e: f64 = p.iter().map(|v| v.norm_squared()).sum();
        Ok(-e * self.value(y, p)?)
    }

    fn node_scale(&self, _y: &[R3], _p: &[R3]) -> Result<f64> {
        Ok(1.0)
    }
}

/// e^{i <P, Y>} times one distortion factor per internal pair. Exact for
/// m = 2; for larger clusters it solves the internal equation only up to
/// terms that fall off as the inverse square of the cluster size.
#[derive(Clone, Debug)]
pub struct CoulombProduct {
    m: usize,
    a0: f64,
    zeta: Vec<Vec<f64>>,
    settings: KummerSettings,
}

pub fn two_body_coulomb(a0: f64) -> Result<CoulombProduct> {
    CoulombProduct::new(2, a0)
}

pub fn bbk_product_cluster(m: usize, a0: f64) -> Result<CoulombProduct> {
    if m < 3 {
        return Err(Error::Configuration(format!(
            "product realization is for clusters of 3 or more, got {m}; use the two-body one"
        )));
    }
    CoulombProduct::new(m, a0)
}

/// Everything the product needs at one point, as log-derivatives.
#[derive(Clone, Debug)]
pub struct ProductEval {
    pub value: Complex64,
    /// grad_{y_nu} ln chi
    pub dlog_y: Vec<C3>,
    /// grad_{p_nu} ln chi
    pub dlog_p: Vec<C3>,
    /// Laplacian_Y chi / chi
    pub lap_over: Complex64,
}

impl CoulombProduct {
    pub fn new(m: usize, a0: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Configuration(format!("cluster size {m} < 2")));
        }
        if !(a0 >= 0.0) || !a0.is_finite() {
            return Err(Error::Configuration(format!("coupling a0 = {a0} must be >= 0")));
        }
        Ok(Self {
            m,
            a0,
            zeta: internal_pairs(m),
            settings: KummerSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: KummerSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn evaluate(&self, y: &[R3], p: &[R3]) -> Result<ProductEval> {
        check_shape(self.m, y, p)?;
        let dof = self.m - 1;
        let mut value = plane_wave(y, p);
        let mut dlog_y: Vec<C3> = p.iter().map(|v| complexify(v) * I).collect();
        let mut dlog_p: Vec<C3> = y.iter().map(|v| complexify(v) * I).collect();
        let mut div = Complex64::new(0.0, 0.0);

        for z in &self.zeta {
            let x = combine(z, y);
            let k = combine(z, p);
            let (xn, kn) = (x.norm(), k.norm());
            if !(kn > 0.0) {
                return Err(Error::SingularMomentum(kn));
            }
            if !(xn > 0.0) {
                return Err(Error::SingularInput("coincident particles inside a cluster".into()));
            }
            let eta = sommerfeld(self.a0, kn)?;
            let (xh, kh) = (x / xn, k / kn);
            let w = 0.5 * kn * xn * (xh - kh).norm_squared();
            let jet = kummer_complex(eta, Complex64::from(w), true, &self.settings)?;
            let l1 = jet.d1 / jet.value;
            let l2 = jet.d2 / jet.value;
            let le = jet.deta.unwrap_or_default() / jet.value;

            let gw_x = xh * kn - k;
            let gw_k = kh * xn - x;
            let geta_k = -kh * (eta.eta() / kn);
            for nu in 0..dof {
                dlog_y[nu] += complexify(&(gw_x * z[nu])) * l1;
                dlog_p[nu] += complexify(&(gw_k * z[nu])) * l1 + complexify(&(geta_k * z[nu])) * le;
            }
            // sum_nu zeta_nu^2 = 1 and Laplacian_x w = 2|k|/|x|
            div += (l2 - l1 * l1) * gw_x.norm_squared() + l1 * (2.0 * kn / xn);
            value *= jet.value;
        }
        let gg: Complex64 = dlog_y.iter().map(|g| cdot(g, g)).sum();
        Ok(ProductEval {
            value,
            dlog_y,
            dlog_p,
            lap_over: div + gg,
        })
    }
}

impl ClusterWavefunction for CoulombProduct {
    fn name(&self) -> &'static str {
        if self.m == 2 {
            "two-body"
        } else {
            "bbk-product"
        }
    }

    fn size(&self) -> usize {
        self.m
    }

    fn coupling(&self) -> f64 {
        self.a0
    }

    fn value(&self, y: &[R3], p: &[R3]) -> Result<Complex64> {
        check_shape(self.m, y, p)?;
        let mut value = plane_wave(y, p);
        for z in &self.zeta {
            let x = combine(z, y);
            let k = combine(z, p);
            let kn = k.norm();
            if !(kn > 0.0) {
                return Err(Error::SingularMomentum(kn));
            }
            let eta = sommerfeld(self.a0, kn)?;
            let w = crate::special::distortion_argument(&x, &k);
            value *= crate::special::phi(eta, Complex64::from(w), &self.settings)?;
        }
        Ok(value)
    }

    fn grad_p(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>> {
        let e = self.evaluate(y, p)?;
        Ok(e.dlog_p.iter().map(|g| g * e.value).collect())
    }

    fn grad_y(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>> {
        let e = self.evaluate(y, p)?;
        Ok(e.dlog_y.iter().map(|g| g * e.value).collect())
    }

    fn laplacian_y(&self, y: &[R3], p: &[R3]) -> Result<Complex64> {
        let e = self.evaluate(y, p)?;
        Ok(e.lap_over * e.value)
    }

    /// Product over pairs of max(1, e^{pi eta/2} / |Gamma(1 + i eta)|),
    /// the large-w modulus of each factor.
    fn node_scale(&self, _y: &[R3], p: &[R3]) -> Result<f64> {
        let mut scale = 1.0;
        for z in &self.zeta {
            let kn = combine(z, p).norm();
            let eta = sommerfeld(self.a0, kn)?.eta();
            let envelope = if eta == 0.0 {
                1.0
            } else {
                // |Gamma(1 + i eta)|^2 = pi eta / sinh(pi eta)
                ((PI * eta).exp() * (PI * eta).sinh() / (PI * eta)).sqrt()
            };
            scale *= envelope.max(1.0);
        }
        Ok(scale)
    }

    fn forward_alignment(&self, y: &[R3], p: &[R3]) -> f64 {
        self.zeta
            .iter()
            .map(|z| {
                let (x, k) = (combine(z, y), combine(z, p));
                x.dot(&k) / (x.norm() * k.norm())
            })
            .fold(-1.0, f64::max)
    }
}

/// Realization names accepted in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realization {
    Free,
    TwoBody,
    BbkProduct,
}

impl Realization {
    /// Build for a cluster of m particles with coupling a0.
    pub fn build(self, m: usize, a0: f64) -> Result<Arc<dyn ClusterWavefunction>> {
        Ok(match self {
            Realization::Free => Arc::new(free_cluster(m)?),
            Realization::TwoBody => {
                if m != 2 {
                    return Err(Error::Configuration(format!(
                        "two-body realization assigned to a cluster of {m}"
                    )));
                }
                Arc::new(two_body_coulomb(a0)?)
            }
            Realization::BbkProduct => Arc::new(CoulombProduct::new(m, a0)?),
        })
    }

    /// Two-body for pairs, product otherwise.
    pub fn default_for(m: usize) -> Self {
        if m == 2 {
            Realization::TwoBody
        } else {
            Realization::BbkProduct
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> R3 {
        let dir = R3::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
        dir * rng.gen_range(lo..hi)
    }

    fn fd_grad_p(chi: &dyn ClusterWavefunction, y: &[R3], p: &[R3], h: f64) -> Vec<C3> {
        let f = |flat: &[f64]| chi.value(y, &unflatten(flat));
        let x = flatten(p);
        let g: Vec<Complex64> = (0..x.len()).map(|i| fd::central(&f, &x, i, h).unwrap()).collect();
        g.chunks_exact(3).map(|c| C3::new(c[0], c[1], c[2])).collect()
    }

    fn max_rel(a: &[C3], b: &[C3]) -> f64 {
        let scale: f64 = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
    }

    #[test]
    fn free_cluster_examples() {
        let c = free_cluster(3).unwrap();
        let y = [R3::new(1.0, 2.0, 3.0), R3::new(-0.5, 0.1, 0.0)];
        let p = [R3::new(0.2, -0.3, 0.9), R3::new(0.0, 1.0, 0.4)];
        let u = u_vectors(&c, &y, &p, DEFAULT_EPS_NODE).unwrap();
        for (uv, yv) in u.u.iter().zip(&y) {
            assert!((uv - complexify(yv)).norm() < 1e-15);
        }
        assert_eq!(c.value(&[R3::zeros(), R3::zeros()], &p).unwrap(), Complex64::from(1.0));
        let e: f64 = p.iter().map(|v| v.norm_squared()).sum();
        assert!((c.laplacian_y(&y, &p).unwrap() + e * c.value(&y, &p).unwrap()).norm() < 1e-15);
        assert!(c.residual_selftest(&y, &p).unwrap() < 1e-8);
    }

    #[test]
    fn two_body_solves_its_equation() {
        let chi = two_body_coulomb(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let y = [rand_vec(&mut rng, 1.0, 50.0)];
            let p = [rand_vec(&mut rng, 0.5, 1.5)];
            let r = chi.residual_selftest(&y, &p).unwrap();
            assert!(r < 1e-8, "y={:?} p={:?} r={r:e}", y[0], p[0]);
            // analytic Laplacian solves it to round-off
            let v = chi.value(&y, &p).unwrap();
            let lap = chi.laplacian_y(&y, &p).unwrap();
            let e = p[0].norm_squared();
            let analytic = ((-lap) + (chi.potential(&y) - e) * v).norm() / v.norm();
            assert!(analytic < 1e-11, "analytic residual {analytic:e}");
        }
    }

    #[test]
    fn selftest_is_fourth_order() {
        let chi = two_body_coulomb(1.0).unwrap();
        let y = [R3::new(1.3, -0.4, 0.8)];
        let p = [R3::new(0.3, 0.6, -0.5)];
        let r: Vec<f64> = [0.16, 0.08, 0.04]
            .iter()
            .map(|&h| chi.residual_selftest_with_step(&y, &p, h).unwrap())
            .collect();
        for w in r.windows(2) {
            let ratio = w[0] / w[1];
            assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn gradients_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let two = two_body_coulomb(1.3).unwrap();
        let three = bbk_product_cluster(3, 0.8).unwrap();
        let free = free_cluster(4).unwrap();
        let chis: [&dyn ClusterWavefunction; 3] = [&two, &three, &free];
        for chi in chis {
            let dof = chi.size() - 1;
            for _ in 0..10 {
                let y: Vec<R3> = (0..dof).map(|_| rand_vec(&mut rng, 1.0, 10.0)).collect();
                let p: Vec<R3> = (0..dof).map(|_| rand_vec(&mut rng, 0.5, 1.5)).collect();
                let g = chi.grad_p(&y, &p).unwrap();
                let e1 = max_rel(&fd_grad_p(chi, &y, &p, 1e-5), &g);
                assert!(e1 < 1e-6, "{} grad_p {e1:e}", chi.name());
                // O(h^2): halving the step quarters the error
                let ea = max_rel(&fd_grad_p(chi, &y, &p, 4e-3), &g);
                let eb = max_rel(&fd_grad_p(chi, &y, &p, 2e-3), &g);
                assert!((3.0..5.0).contains(&(ea / eb)), "{} ratio {}", chi.name(), ea / eb);
                // analytic grad_y against the trait's stencil fallback
                let f = |flat: &[f64]| chi.value(&unflatten(flat), &p);
                let fdy = fd::gradient(&f, &flatten(&y), &vec![1e-3; 3 * dof]).unwrap();
                let fdy: Vec<C3> = fdy.chunks_exact(3).map(|c| C3::new(c[0], c[1], c[2])).collect();
                assert!(max_rel(&fdy, &chi.grad_y(&y, &p).unwrap()) < 1e-9);
            }
        }
    }

    #[test]
    fn weak_coupling_reduces_to_plane_wave() {
        let chi = two_body_coulomb(1e-12).unwrap();
        let free = free_cluster(2).unwrap();
        let y = [R3::new(3.0, -1.0, 2.0)];
        let p = [R3::new(0.1, 0.7, -0.2)];
        assert!((chi.value(&y, &p).unwrap() - free.value(&y, &p).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn u_vectors_of_two_body() {
        let chi = two_body_coulomb(1.0).unwrap();
        let p = [R3::new(0.0, 0.0, 1.0)];
        // forward alignment: w = 0, u = y exactly
        let y = [R3::new(0.0, 0.0, 4.0)];
        let u = u_vectors(&chi, &y, &p, DEFAULT_EPS_NODE).unwrap();
        assert!((u.u[0] - complexify(&y[0])).norm() < 1e-12);
        // non-forward: |u - y| / |y| decreases along |y|
        let dir = R3::new(1.0, 0.0, -1.0).normalize();
        let mut last = f64::INFINITY;
        for r in [5.0, 20.0, 80.0, 320.0, 1280.0] {
            let y = [dir * r];
            let u = u_vectors(&chi, &y, &p, DEFAULT_EPS_NODE).unwrap();
            let d = (u.u[0] - complexify(&y[0])).norm() / r;
            assert!(d < last, "r={r}");
            last = d;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn product_of_aligned_pairs_is_plane_wave() {
        // every internal pair along its own momentum: all factors are 1
        let chi = bbk_product_cluster(3, 1.0).unwrap();
        let p = [R3::new(0.0, 0.0, 0.8), R3::new(0.0, 0.0, 0.6)];
        let y = [R3::new(0.0, 0.0, 2.0), R3::new(0.0, 0.0, 3.0)];
        assert!(chi.forward_alignment(&y, &p) > 1.0 - 1e-12);
        let v = chi.value(&y, &p).unwrap();
        assert!((v - plane_wave(&y, &p)).norm() < 1e-14);
    }

    #[test]
    fn product_residual_decays_with_cluster_size() {
        let chi = bbk_product_cluster(3, 1.0).unwrap();
        let p = [R3::new(0.4, -0.2, 0.7), R3::new(-0.3, 0.8, 0.1)];
        let dir = [R3::new(0.3, 0.9, -0.2), R3::new(-0.7, 0.1, 0.5)];
        let mut pts = Vec::new();
        for i in 0..8 {
            let r = 10.0 * 1.8f64.powi(i);
            let y: Vec<R3> = dir.iter().map(|d| d * r).collect();
            let v = chi.value(&y, &p).unwrap();
            let lap = chi.laplacian_y(&y, &p).unwrap();
            let e: f64 = p.iter().map(|v| v.norm_squared()).sum();
            let res = ((-lap) + (chi.potential(&y) - e) * v).norm() / v.norm();
            pts.push((cluster_hyperradius(3, &y).ln(), res.ln()));
        }
        let n = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / n,
            pts.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(slope <= -1.7, "slope {slope}");
    }

    #[test]
    fn node_detection() {
        #[derive(Debug)]
        struct Vanishing;
        impl ClusterWavefunction for Vanishing {
            fn name(&self) -> &'static str {
                "vanishing"
            }
            fn size(&self) -> usize {
                2
            }
            fn coupling(&self) -> f64 {
                0.0
            }
            fn value(&self, y: &[R3], _p: &[R3]) -> Result<Complex64> {
                Ok(Complex64::from(y[0].x))
            }
            fn grad_p(&self, _y: &[R3], _p: &[R3]) -> Result<Vec<C3>> {
                Ok(vec![C3::zeros()])
            }
        }
        let p = [R3::new(0.0, 0.0, 1.0)];
        let err = u_vectors(&Vanishing, &[R3::new(1e-12, 0.0, 0.0)], &p, DEFAULT_EPS_NODE);
        assert!(matches!(err, Err(Error::Node { .. })));
        assert!(u_vectors(&Vanishing, &[R3::new(0.3, 0.0, 0.0)], &p, DEFAULT_EPS_NODE).is_ok());
    }

    #[test]
    fn singular_momentum() {
        let chi = two_body_coulomb(1.0).unwrap();
        let r = chi.value(&[R3::new(1.0, 0.0, 0.0)], &[R3::zeros()]);
        assert!(matches!(r, Err(Error::SingularMomentum(_))));
        assert!(bbk_product_cluster(2, 1.0).is_err());
        assert!(Realization::TwoBody.build(3, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn u_is_phase_invariant(theta in 0.0f64..std::f64::consts::TAU, yx in 1.0f64..20.0, yz in -5.0f64..5.0, px in 0.3f64..1.5) {
            #[derive(Debug)]
            struct Rotated(CoulombProduct, Complex64);
            impl ClusterWavefunction for Rotated {
                fn name(&self) -> &'static str { "rotated" }
                fn size(&self) -> usize { self.0.size() }
                fn coupling(&self) -> f64 { self.0.coupling() }
                fn value(&self, y: &[R3], p: &[R3]) -> Result<Complex64> { Ok(self.1 * self.0.value(y, p)?) }
                fn grad_p(&self, y: &[R3], p: &[R3]) -> Result<Vec<C3>> {
                    Ok(self.0.grad_p(y, p)?.into_iter().map(|g| g * self.1).collect())
                }
            }
            let base = two_body_coulomb(1.0).unwrap();
            let y = [R3::new(yx, 0.5, yz)];
            let p = [R3::new(px, -0.2, 0.3)];
            let u0 = u_vectors(&base, &y, &p, DEFAULT_EPS_NODE).unwrap();
            let rot = Rotated(base, Complex64::from_polar(1.0, theta));
            let u1 = u_vectors(&rot, &y, &p, DEFAULT_EPS_NODE).unwrap();
            prop_assert!((u0.u[0] - u1.u[0]).norm() < 1e-12 * (1.0 + u0.u[0].norm()));
        }
    }
}
