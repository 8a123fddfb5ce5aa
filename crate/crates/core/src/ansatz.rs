//! The asymptotic ansatz
//!
//!   Psi = e^{i <Q_0, X_0>} prod_j chi_j(Y_j, P_j) prod_{alpha in M0} Phi(x~_alpha, k_alpha)
//!
//! where the cross-pair coordinate x~_alpha is x_alpha with every cluster
//! coordinate y replaced by the u-vector of its cluster. With no clusters
//! this is the product of a plane wave and one distortion factor per pair.
//!
//! For complex x~ the length |x~| is the principal square root of
//! x~ . x~ (bilinear), so Phi is continued holomorphically in x~.

use crate::cluster::{u_vectors, ClusterWavefunction, UVectors, DEFAULT_EPS_NODE};
use crate::error::{Error, Result};
use crate::kinematics::{JacobiBasis, ParticleSystem};
use crate::special::{
    distortion_argument, kummer, kummer_complex, regular_component, sommerfeld, KummerSettings, SommerfeldParameter,
};
use crate::vec3::{cdot_r, clength, complexify, cscale, C3, R3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const DEFAULT_DELTA_CONE: f64 = 0.05;

/// How the cross-pair factors are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossFactor {
    /// The full distortion factor.
    #[default]
    Full,
    /// Only the part of the factor without the outgoing e^{i w} wave. A
    /// diagnostic: it isolates the contribution of that wave to the residual.
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzSettings {
    pub delta_cone: f64,
    pub eps_node: f64,
    pub cross_factor: CrossFactor,
    pub kummer: KummerSettings,
}

impl Default for AnsatzSettings {
    fn default() -> Self {
        Self {
            delta_cone: DEFAULT_DELTA_CONE,
            eps_node: DEFAULT_EPS_NODE,
            cross_factor: CrossFactor::Full,
            kummer: KummerSettings::default(),
        }
    }
}

/// Coordinates X and momenta Q, one 3-vector per Jacobi coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringConfiguration {
    pub x: Vec<R3>,
    pub q: Vec<R3>,
}

impl ScatteringConfiguration {
    pub fn new(basis: &JacobiBasis, x: Vec<R3>, q: Vec<R3>) -> Result<Self> {
        if x.len() != basis.dof() || q.len() != basis.dof() {
            return Err(Error::Misuse(format!(
                "configuration needs {} coordinates and momenta, got {} and {}",
                basis.dof(),
                x.len(),
                q.len()
            )));
        }
        Ok(Self { x, q })
    }

    /// E = |Q|^2
    pub fn energy(&self) -> f64 {
        self.q.iter().map(|v| v.norm_squared()).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Flags {
    /// Some cross pair has <x^, k^> > 1 - delta_cone.
    pub forward_cone: bool,
    /// Largest <x^_alpha, k^_alpha> over cross pairs.
    pub alignment: f64,
    /// Some cluster factor is within sqrt(eps_node) of its node threshold.
    pub node: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzValue {
    pub psi: Complex64,
    /// e^{i <Q_0, X_0>}
    pub plane_wave: Complex64,
    pub chi: Vec<Complex64>,
    /// Particle pair (0-based) and its cross factor.
    pub cross: Vec<((usize, usize), Complex64)>,
    pub tilde_x: Vec<C3>,
    pub flags: Flags,
}

impl AnsatzValue {
    /// Product of the recorded factors.
    pub fn factor_product(&self) -> Complex64 {
        self.chi.iter().product::<Complex64>() * self.cross.iter().map(|c| c.1).product::<Complex64>() * self.plane_wave
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("psi_re,psi_im,plane_re,plane_im");
        for j in 0..self.chi.len() {
            let _ = write!(h, ",chi{}_re,chi{}_im", j + 1, j + 1);
        }
        for ((i, j), _) in &self.cross {
            let _ = write!(h, ",phi{}{}_re,phi{}{}_im", i + 1, j + 1, i + 1, j + 1);
        }
        h.push_str(",forward_cone,node");
        h
    }

    pub fn csv_row(&self) -> String {
        let mut r = format!(
            "{:e},{:e},{:e},{:e}",
            self.psi.re, self.psi.im, self.plane_wave.re, self.plane_wave.im
        );
        for c in self.chi.iter().chain(self.cross.iter().map(|c| &c.1)) {
            let _ = write!(r, ",{:e},{:e}", c.re, c.im);
        }
        let _ = write!(r, ",{},{}", self.flags.forward_cone as u8, self.flags.node as u8);
        r
    }
}

/// Cross pair data fixed by the momenta.
#[derive(Clone, Debug)]
struct CrossPair {
    alpha: usize,
    pair: (usize, usize),
    k: R3,
    k_norm: f64,
    eta: SommerfeldParameter,
}

/// The ansatz for fixed basis, cluster realizations and momenta.
#[derive(Clone, Debug)]
pub struct AnsatzModel {
    basis: JacobiBasis,
    chis: Vec<Arc<dyn ClusterWavefunction>>,
    q: Vec<R3>,
    cross: Vec<CrossPair>,
    settings: AnsatzSettings,
}

impl AnsatzModel {
    pub fn new(
        basis: JacobiBasis,
        chis: Vec<Arc<dyn ClusterWavefunction>>,
        q: Vec<R3>,
        settings: AnsatzSettings,
    ) -> Result<Self> {
        let d = basis.decomposition();
        if chis.len() != d.l() {
            return Err(Error::Configuration(format!(
                "{} cluster realizations for {} clusters",
                chis.len(),
                d.l()
            )));
        }
        for (j, chi) in chis.iter().enumerate() {
            if chi.size() != d.clusters()[j].len() {
                return Err(Error::Configuration(format!(
                    "realization for cluster {} has size {}, cluster has {}",
                    j + 1,
                    chi.size(),
                    d.clusters()[j].len()
                )));
            }
        }
        if q.len() != basis.dof() {
            return Err(Error::Misuse(format!("need {} momenta, got {}", basis.dof(), q.len())));
        }
        let cm = basis.coefficients();
        let a0 = basis.system().a0();
        let cross = cm
            .cross()
            .map(|alpha| {
                let k = cm.combine(alpha, &q);
                let k_norm = k.norm();
                Ok(CrossPair {
                    alpha,
                    pair: cm.pair(alpha),
                    k,
                    k_norm,
                    eta: sommerfeld(a0, k_norm)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            basis,
            chis,
            q,
            cross,
            settings,
        })
    }

    pub fn with_settings(&self, settings: AnsatzSettings) -> Self {
        Self {
            settings,
            ..self.clone()
        }
    }

    pub fn basis(&self) -> &JacobiBasis {
        &self.basis
    }

    pub fn momenta(&self) -> &[R3] {
        &self.q
    }

    pub fn settings(&self) -> &AnsatzSettings {
        &self.settings
    }

    pub fn chis(&self) -> &[Arc<dyn ClusterWavefunction>] {
        &self.chis
    }

    pub fn energy(&self) -> f64 {
        self.q.iter().map(|v| v.norm_squared()).sum()
    }

    /// Cross pairs as (pair index, particles, k_alpha).
    pub fn cross_pairs(&self) -> impl Iterator<Item = (usize, (usize, usize), R3)> + '_ {
        self.cross.iter().map(|c| (c.alpha, c.pair, c.k))
    }

    pub fn cluster_block<'a>(&self, j: usize, v: &'a [R3]) -> &'a [R3] {
        &v[self.basis.cluster_rows(j)]
    }

    /// u-vectors of every cluster at coordinates X.
    pub fn u_all(&self, x: &[R3]) -> Result<Vec<UVectors>> {
        self.chis
            .iter()
            .enumerate()
            .map(|(j, chi)| {
                let rows = self.basis.cluster_rows(j);
                u_vectors(chi.as_ref(), &x[rows.clone()], &self.q[rows], self.settings.eps_node).map_err(|e| match e {
                    Error::Node {
                        magnitude, threshold, ..
                    } => Error::Node {
                        cluster: j + 1,
                        magnitude,
                        threshold,
                    },
                    other => other,
                })
            })
            .collect()
    }

    /// x~_alpha for a cross pair, with u fixed.
    pub fn tilde_x(&self, u_all: &[UVectors], x: &[R3], alpha: usize) -> Result<C3> {
        tilde_x(&self.basis, u_all, x, alpha)
    }

    fn cross_factor(&self, c: &CrossPair, xt: &C3) -> Result<Complex64> {
        let len = clength(xt);
        let w = c.k_norm * len - cdot_r(xt, &c.k);
        match self.settings.cross_factor {
            CrossFactor::Full => Ok(kummer_complex(c.eta, w, false, &self.settings.kummer)?.value),
            CrossFactor::Regular => Ok(regular_component(c.eta, w, &self.settings.kummer)?.value),
        }
    }

    /// prod over cross pairs of the modified factors, with u given.
    pub fn envelope_with_u(&self, u_all: &[UVectors], x: &[R3]) -> Result<Complex64> {
        let mut g = Complex64::new(1.0, 0.0);
        for c in &self.cross {
            let xt = self.tilde_x(u_all, x, c.alpha)?;
            g *= self.cross_factor(c, &xt)?;
        }
        Ok(g)
    }

    /// prod over cross pairs of the modified factors.
    pub fn envelope(&self, x: &[R3]) -> Result<Complex64> {
        let u = self.u_all(x)?;
        self.envelope_with_u(&u, x)
    }

    /// Largest <x^_alpha, k^_alpha> over cross pairs.
    pub fn alignment(&self, x: &[R3]) -> f64 {
        let cm = self.basis.coefficients();
        self.cross
            .iter()
            .map(|c| {
                let xa = cm.combine(c.alpha, x);
                xa.dot(&c.k) / (xa.norm() * c.k_norm)
            })
            .fold(-1.0, f64::max)
    }

    pub fn evaluate(&self, x: &[R3]) -> Result<AnsatzValue> {
        if x.len() != self.basis.dof() {
            return Err(Error::Misuse(format!(
                "need {} coordinates, got {}",
                self.basis.dof(),
                x.len()
            )));
        }
        let z_rows = self.basis.z_rows();
        let phase: f64 = z_rows.clone().map(|k| x[k].dot(&self.q[k])).sum();
        let plane_wave = (I * phase).exp();
        let u_all = self.u_all(x)?;
        let mut node = false;
        let mut chi = Vec::with_capacity(self.chis.len());
        for (j, c) in self.chis.iter().enumerate() {
            let rows = self.basis.cluster_rows(j);
            let (y, p) = (&x[rows.clone()], &self.q[rows]);
            let v = c.value(y, p)?;
            if v.norm() < self.settings.eps_node.sqrt() * c.node_scale(y, p)? {
                node = true;
            }
            chi.push(v);
        }
        let mut cross = Vec::with_capacity(self.cross.len());
        let mut tilde = Vec::with_capacity(self.cross.len());
        for c in &self.cross {
            let xt = self.tilde_x(&u_all, x, c.alpha)?;
            cross.push((c.pair, self.cross_factor(c, &xt)?));
            tilde.push(xt);
        }
        let alignment = self.alignment(x);
        let value = AnsatzValue {
            psi: Complex64::new(0.0, 0.0),
            plane_wave,
            chi,
            cross,
            tilde_x: tilde,
            flags: Flags {
                forward_cone: alignment > 1.0 - self.settings.delta_cone,
                alignment,
                node,
            },
        };
        Ok(AnsatzValue {
            psi: value.factor_product(),
            ..value
        })
    }
}

/// x~_alpha = sum_j sum_nu zeta_{alpha nu} u^{(j)}_nu + sum_nu zeta_{alpha nu} z_nu.
/// Only defined for cross pairs.
pub fn tilde_x(basis: &JacobiBasis, u_all: &[UVectors], x: &[R3], alpha: usize) -> Result<C3> {
    let cm = basis.coefficients();
    if cm.is_within(alpha) {
        let (i, j) = cm.pair(alpha);
        return Err(Error::Misuse(format!(
            "pair ({}, {}) lies inside a cluster and has no modified coordinate",
            i + 1,
            j + 1
        )));
    }
    if u_all.len() != basis.decomposition().l() {
        return Err(Error::Misuse("one u-vector set per cluster is required".into()));
    }
    let mut xt = C3::zeros();
    for (j, u) in u_all.iter().enumerate() {
        for (nu, k) in basis.cluster_rows(j).enumerate() {
            xt += cscale(&u.u[nu], cm.get(alpha, k));
        }
    }
    for k in basis.z_rows() {
        xt += complexify(&(x[k] * cm.get(alpha, k)));
    }
    Ok(xt)
}

/// e^{i <Q, X>} prod over all pairs of Phi(x_alpha, k_alpha).
pub fn bbk_fully_separated(
    system: &ParticleSystem,
    basis: &JacobiBasis,
    x: &[R3],
    q: &[R3],
    delta_cone: f64,
) -> Result<AnsatzValue> {
    let cm = basis.coefficients();
    let phase: f64 = x.iter().zip(q).map(|(a, b)| a.dot(b)).sum();
    let plane_wave = (I * phase).exp();
    let mut cross = Vec::with_capacity(cm.len());
    let mut tilde = Vec::with_capacity(cm.len());
    let mut alignment = -1.0f64;
    for alpha in 0..cm.len() {
        let xa = cm.combine(alpha, x);
        let ka = cm.combine(alpha, q);
        let (xn, kn) = (xa.norm(), ka.norm());
        if !(xn > 0.0) || !(kn > 0.0) {
            let (i, j) = cm.pair(alpha);
            return Err(Error::SingularInput(format!(
                "pair ({}, {}) has |x| = {xn:e}, |k| = {kn:e}",
                i + 1,
                j + 1
            )));
        }
        alignment = alignment.max(xa.dot(&ka) / (xn * kn));
        let eta = sommerfeld(system.a0(), kn)?;
        cross.push((cm.pair(alpha), kummer(eta, distortion_argument(&xa, &ka))?.value));
        tilde.push(complexify(&xa));
    }
    let value = AnsatzValue {
        psi: Complex64::new(0.0, 0.0),
        plane_wave,
        chi: Vec::new(),
        cross,
        tilde_x: tilde,
        flags: Flags {
            forward_cone: alignment > 1.0 - delta_cone,
            alignment,
            node: false,
        },
    };
    Ok(AnsatzValue {
        psi: value.factor_product(),
        ..value
    })
}

/// One-shot evaluation of the cluster ansatz.
pub fn cluster_ansatz(
    basis: &JacobiBasis,
    chis: &[Arc<dyn ClusterWavefunction>],
    x: &[R3],
    q: &[R3],
    settings: AnsatzSettings,
) -> Result<AnsatzValue> {
    AnsatzModel::new(basis.clone(), chis.to_vec(), q.to_vec(), settings)?.evaluate(x)
}

/// Cluster ansatz over the fully separated product at one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyPoint {
    pub r: f64,
    pub ratio: Complex64,
    /// |ratio - 1|
    pub deviation: f64,
    pub alignment: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub points: Vec<ConsistencyPoint>,
    /// Log-log trend of the deviation; it oscillates, so only the trend is
    /// expected to fall.
    pub trend: crate::fit::LineFit,
}

impl ConsistencyReport {
    pub fn last_deviation(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |p| p.deviation)
    }
}

/// Compares the cluster ansatz with the fully separated product along
/// X = R * direction over all coordinates, clusters included.
pub fn asymptotic_consistency(model: &AnsatzModel, direction: &[R3], scales: &[f64]) -> Result<ConsistencyReport> {
    let basis = model.basis();
    let mut points = Vec::with_capacity(scales.len());
    for &r in scales {
        let x: Vec<R3> = direction.iter().map(|d| d * r).collect();
        let a = model.evaluate(&x)?;
        let f = bbk_fully_separated(basis.system(), basis, &x, model.momenta(), model.settings().delta_cone)?;
        let ratio = a.psi / f.psi;
        points.push(ConsistencyPoint {
            r,
            ratio,
            deviation: (ratio - 1.0).norm(),
            alignment: f.flags.alignment,
        });
    }
    let (r, dev): (Vec<f64>, Vec<f64>) = points.iter().map(|p| (p.r, p.deviation)).unzip();
    let trend = crate::fit::loglog(&r, &dev)?;
    Ok(ConsistencyReport { points, trend })
}
