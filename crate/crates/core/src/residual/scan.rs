//! Decay of |S / Psi| along rays X(R) = Y + R * direction, where Y fixes
//! the cluster coordinates and the direction lives in the separating block.

use super::discrepancy::{discrepancy, Discrepancy};
use super::hamiltonian::StepPolicy;
use crate::ansatz::{AnsatzModel, AnsatzSettings, DEFAULT_DELTA_CONE};
use crate::cluster::DEFAULT_EPS_NODE;
use crate::error::{Error, Result};
use crate::fit::{geometric_grid, loglog, LineFit};
use crate::kinematics::JacobiBasis;
use crate::vec3::R3;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;

pub const CSV_VERSION: &str = "ray-scan/1";
pub const MIN_USABLE_POINTS: usize = 5;
pub const DEFAULT_POINTS: usize = 12;
/// R_max * min |zeta| must exceed this multiple of Omega.
pub const SEPARATION_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct RayScanSpec {
    /// Cluster coordinates, one per cluster row of the basis.
    pub y: Vec<R3>,
    /// Unit vector over the separating rows.
    pub direction: Vec<R3>,
    /// Bound on every |y_beta|.
    pub omega: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub steps: StepPolicy,
    pub delta_cone: f64,
    pub eps_node: f64,
}

impl RayScanSpec {
    /// Default grid [1e2, 1e4] * (1 + Omega).
    pub fn new(y: Vec<R3>, direction: Vec<R3>, omega: f64) -> Self {
        Self {
            y,
            direction,
            omega,
            r_min: 1e2 * (1.0 + omega),
            r_max: 1e4 * (1.0 + omega),
            points: DEFAULT_POINTS,
            steps: StepPolicy::default(),
            delta_cone: DEFAULT_DELTA_CONE,
            eps_node: DEFAULT_EPS_NODE,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        geometric_grid(self.r_min, self.r_max, self.points)
    }

    pub fn validate(&self, basis: &JacobiBasis) -> Result<()> {
        let z = basis.z_rows();
        if self.y.len() != z.start {
            return Err(Error::Configuration(format!(
                "{} cluster coordinates given, the basis has {}",
                self.y.len(),
                z.start
            )));
        }
        if self.direction.len() != z.len() {
            return Err(Error::Configuration(format!(
                "direction has {} blocks, the separating space has {}",
                self.direction.len(),
                z.len()
            )));
        }
        let norm = self.direction.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Configuration(format!("direction has norm {norm}, expected 1")));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::Configuration("omega must be non-negative".into()));
        }
        if let Some(big) = self
            .y
            .iter()
            .map(|v| v.norm())
            .find(|n| *n > self.omega * (1.0 + 1e-12))
        {
            return Err(Error::Configuration(format!(
                "|y| = {big} exceeds omega = {}",
                self.omega
            )));
        }
        if !(self.r_min > 0.0 && self.r_max > self.r_min) {
            return Err(Error::Configuration(format!(
                "bad R range [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if self.points < MIN_USABLE_POINTS {
            return Err(Error::Configuration(format!(
                "{} grid points, at least {MIN_USABLE_POINTS} needed",
                self.points
            )));
        }
        if !(self.delta_cone >= 0.0 && self.delta_cone < 2.0) {
            return Err(Error::Configuration(format!(
                "delta_cone = {} outside [0, 2)",
                self.delta_cone
            )));
        }
        if !(self.eps_node > 0.0 && self.eps_node < 1.0) {
            return Err(Error::Configuration(format!(
                "eps_node = {} outside (0, 1)",
                self.eps_node
            )));
        }
        let zeta_min = min_separating_coefficient(basis);
        if self.omega > 0.0 && self.r_max * zeta_min < SEPARATION_FACTOR * self.omega {
            return Err(Error::Configuration(format!(
                "R_max * min|zeta| = {} is not large against omega = {}",
                self.r_max * zeta_min,
                self.omega
            )));
        }
        Ok(())
    }

    pub fn point(&self, r: f64) -> Vec<R3> {
        self.y
            .iter()
            .copied()
            .chain(self.direction.iter().map(|d| d * r))
            .collect()
    }
}

/// Smallest norm of the separating coefficients over cross pairs.
pub fn min_separating_coefficient(basis: &JacobiBasis) -> f64 {
    let cm = basis.coefficients();
    cm.cross()
        .map(|a| basis.z_rows().map(|k| cm.get(a, k).powi(2)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Random Y with |y_beta| <= Omega and a random separating direction whose
/// asymptotic alignment stays below 1 - 2 delta_cone, so that the whole ray
/// clears the forward cones with some margin. Y is redrawn while some pair
/// inside a cluster is closer than Omega / 10.
pub fn random_ray<R: Rng>(model: &AnsatzModel, omega: f64, delta_cone: f64, rng: &mut R) -> Result<(Vec<R3>, Vec<R3>)> {
    let basis = model.basis();
    let z = basis.z_rows();
    let cm = basis.coefficients();
    let y = loop {
        let y: Vec<R3> = (0..z.start).map(|_| random_in_ball(rng) * omega).collect();
        let mut padded = y.clone();
        padded.extend(z.clone().map(|_| R3::zeros()));
        if cm.within().all(|a| cm.combine(a, &padded).norm() >= 0.1 * omega) {
            break y;
        }
    };
    for _ in 0..10_000 {
        let mut dir: Vec<R3> = z.clone().map(|_| random_in_ball(rng)).collect();
        let norm = dir.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        dir.iter_mut().for_each(|v| *v /= norm);
        let mut padded = vec![R3::zeros(); z.start];
        padded.extend(dir.iter().copied());
        let clear = model.cross_pairs().all(|(alpha, _, k)| {
            let xa = cm.combine(alpha, &padded);
            xa.norm() > 0.0 && xa.dot(&k) / (xa.norm() * k.norm()) < 1.0 - 2.0 * delta_cone
        });
        if clear {
            return Ok((y, dir));
        }
    }
    Err(Error::Configuration("no direction clears the forward cones".into()))
}

fn random_in_ball<R: Rng>(rng: &mut R) -> R3 {
    loop {
        let v = R3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exclusion {
    ForwardCone,
    Node,
    Both,
}

impl Exclusion {
    pub fn label(self) -> &'static str {
        match self {
            Exclusion::ForwardCone => "forward-cone",
            Exclusion::Node => "node",
            Exclusion::Both => "forward-cone|node",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanPoint {
    pub r: f64,
    /// None for excluded points.
    pub value: Option<Discrepancy>,
    pub potential: f64,
    pub cross_potential: f64,
    pub alignment: f64,
    pub excluded: Option<Exclusion>,
}

impl ScanPoint {
    pub fn s(&self) -> Option<Complex64> {
        self.value.map(|d| d.s())
    }

    pub fn ratio(&self) -> Option<f64> {
        self.value.map(|d| d.s_over_psi.norm())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub slope: f64,
    pub slope_se: f64,
    /// Fitted on the cross-pair potential, the part that varies along the ray.
    pub potential_slope: f64,
    pub potential_slope_se: f64,
    pub excluded: Vec<(f64, Exclusion)>,
    pub r_range: (f64, f64),
    pub used: usize,
    pub points: Vec<ScanPoint>,
}

impl DecayReport {
    pub fn csv(&self) -> String {
        let mut out = format!("# {CSV_VERSION}\nR,re_S,im_S,abs_S_over_psi,V,flags,V_cross,alignment\n");
        for p in &self.points {
            let (s, ratio) = match (p.s(), p.ratio()) {
                (Some(s), Some(r)) => (s, r),
                _ => (Complex64::new(f64::NAN, f64::NAN), f64::NAN),
            };
            let flags = p.excluded.map_or("ok", Exclusion::label);
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e}",
                p.r, s.re, s.im, ratio, p.potential, flags, p.cross_potential, p.alignment
            );
        }
        out
    }
}

fn scan_point(model: &AnsatzModel, spec: &RayScanSpec, r: f64) -> Result<ScanPoint> {
    let x = spec.point(r);
    let basis = model.basis();
    let alignment = model.alignment(&x);
    let mut point = ScanPoint {
        r,
        value: None,
        potential: basis.potential(&x),
        cross_potential: super::discrepancy::cross_potential(model, &x),
        alignment,
        excluded: None,
    };
    let forward = alignment > 1.0 - spec.delta_cone;
    let node = match model.evaluate(&x) {
        Ok(v) => v.flags.node,
        Err(Error::Node { .. }) => true,
        Err(e) => return Err(e),
    };
    point.excluded = match (forward, node) {
        (true, true) => Some(Exclusion::Both),
        (true, false) => Some(Exclusion::ForwardCone),
        (false, true) => Some(Exclusion::Node),
        (false, false) => None,
    };
    if point.excluded.is_none() {
        match discrepancy(model, &x, &spec.steps) {
            Ok(d) => point.value = Some(d),
            Err(Error::Node { .. }) => point.excluded = Some(Exclusion::Node),
            Err(e) => return Err(e),
        }
    }
    Ok(point)
}

/// Evaluates every grid point in parallel, gathers them in grid order and
/// fits both decay exponents on the points that are not excluded.
pub fn ray_scan(model: &AnsatzModel, spec: &RayScanSpec) -> Result<DecayReport> {
    spec.validate(model.basis())?;
    let model = model.with_settings(AnsatzSettings {
        delta_cone: spec.delta_cone,
        eps_node: spec.eps_node,
        ..*model.settings()
    });
    let points = spec
        .grid()
        .into_par_iter()
        .map(|r| scan_point(&model, spec, r))
        .collect::<Result<Vec<_>>>()?;
    report(points)
}

/// Fits a report from already evaluated points.
pub fn report(points: Vec<ScanPoint>) -> Result<DecayReport> {
    let mut r = Vec::new();
    let mut ratio = Vec::new();
    let mut v = Vec::new();
    let mut excluded = Vec::new();
    for p in &points {
        match (p.excluded, p.ratio()) {
            (Some(why), _) => excluded.push((p.r, why)),
            (None, Some(s)) => {
                r.push(p.r);
                ratio.push(s);
                v.push(p.cross_potential);
            }
            (None, None) => unreachable!("point without value or exclusion"),
        }
    }
    if r.len() < MIN_USABLE_POINTS {
        return Err(Error::InsufficientData {
            usable: r.len(),
            required: MIN_USABLE_POINTS,
        });
    }
    let fit: LineFit = loglog(&r, &ratio)?;
    let pot = if v.iter().all(|x| *x == 0.0) {
        // a0 = 0: no potential to compare against
        LineFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            slope_se: f64::NAN,
            points: 0,
        }
    } else {
        loglog(&r, &v)?
    };
    if !fit.slope.is_finite() {
        return Err(Error::Range(format!("non-finite slope {}", fit.slope)));
    }
    Ok(DecayReport {
        slope: fit.slope,
        slope_se: fit.slope_se,
        potential_slope: pot.slope,
        potential_slope_se: pot.slope_se,
        excluded,
        r_range: (r[0], r[r.len() - 1]),
        used: r.len(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Realization;
    use crate::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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
    fn validation() {
        let m = model(
            3,
            vec![vec![0, 1]],
            vec![R3::new(0.3, 0.1, 0.2), R3::new(0.5, -0.2, 0.4)],
        );
        let ok = RayScanSpec::new(vec![R3::new(0.5, 0.0, 0.0)], vec![R3::new(0.0, 0.0, 1.0)], 1.0);
        ok.validate(m.basis()).unwrap();
        let bad_norm = RayScanSpec {
            direction: vec![R3::new(0.0, 0.0, 2.0)],
            ..ok.clone()
        };
        assert!(bad_norm.validate(m.basis()).is_err());
        let outside = RayScanSpec {
            y: vec![R3::new(3.0, 0.0, 0.0)],
            ..ok.clone()
        };
        assert!(outside.validate(m.basis()).is_err());
        let short = RayScanSpec {
            r_max: 5.0,
            r_min: 1.0,
            ..ok.clone()
        };
        assert!(short.validate(m.basis()).is_err());
        let few = RayScanSpec { points: 4, ..ok };
        assert!(few.validate(m.basis()).is_err());
    }

    #[test]
    fn two_body_scan_sits_at_the_floor() {
        let m = model(2, vec![], vec![R3::new(0.3, 0.4, -0.5)]);
        let spec = RayScanSpec::new(vec![], vec![R3::new(-0.6, 0.0, 0.8)], 0.0);
        let rep = ray_scan(&m, &spec).unwrap();
        assert_eq!(rep.used, DEFAULT_POINTS);
        for p in &rep.points {
            assert!(p.ratio().unwrap() < 1e-8);
        }
        assert!((rep.potential_slope + 1.0).abs() < 1e-10);
    }

    #[test]
    fn three_body_singletons_decay_faster_than_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let q = vec![R3::new(0.4, -0.3, 0.5), R3::new(-0.2, 0.6, 0.3)];
        let m = model(3, vec![], q);
        let (y, dir) = random_ray(&m, 0.0, DEFAULT_DELTA_CONE, &mut rng).unwrap();
        let rep = ray_scan(&m, &RayScanSpec::new(y, dir, 0.0)).unwrap();
        assert!(rep.slope <= -1.7, "slope {}", rep.slope);
        assert!((rep.potential_slope + 1.0).abs() < 0.1);
        assert!(rep.excluded.is_empty());
    }

    #[test]
    fn forward_cone_points_are_excluded_not_dropped() {
        let k = R3::new(0.0, 0.0, 0.8);
        let m = model(2, vec![], vec![k]);
        let spec = RayScanSpec::new(vec![], vec![R3::new(0.1, 0.0, 1.0).normalize()], 0.0);
        let rep = ray_scan(&m, &spec);
        assert!(matches!(rep, Err(Error::InsufficientData { usable: 0, .. })));
        let points: Vec<ScanPoint> = spec.grid().iter().map(|r| scan_point(&m, &spec, *r).unwrap()).collect();
        assert!(points.iter().all(|p| p.excluded == Some(Exclusion::ForwardCone)));
    }

    #[test]
    fn csv_is_ordered_and_versioned() {
        let m = model(2, vec![], vec![R3::new(0.3, 0.4, -0.5)]);
        let spec = RayScanSpec::new(vec![], vec![R3::new(-0.6, 0.0, 0.8)], 0.0);
        let a = ray_scan(&m, &spec).unwrap().csv();
        let b = ray_scan(&m, &spec).unwrap().csv();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[0], format!("# {CSV_VERSION}"));
        assert_eq!(lines.len(), 2 + DEFAULT_POINTS);
        let rs: Vec<f64> = lines[2..]
            .iter()
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(rs.windows(2).all(|w| w[0] < w[1]));
    }
}
