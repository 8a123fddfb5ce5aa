//! TOML experiment configuration.
//!
//! ```toml
//! scenario = "residual-scan"
//! seed = 7
//!
//! [system]
//! n = 3
//! a0 = 1.0
//!
//! [decomposition]
//! clusters = [[1, 2]]          # 1-based, unlisted particles are singletons
//! realizations = ["two-body"]  # optional, one per cluster
//!
//! [momenta]
//! random = { min = 0.5, max = 1.5 }
//!
//! [scan]
//! omega = 2.0
//! rays = 10
//! ```

use crate::ansatz::{AnsatzModel, AnsatzSettings, CrossFactor, DEFAULT_DELTA_CONE};
use crate::cluster::{Realization, DEFAULT_EPS_NODE};
use crate::error::{Error, Result};
use crate::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasis, JacobiBasisSpec, ParticleSystem, Unit};
use crate::residual::{CalibrationSpec, StepPolicy, SIGMA_STEP};
use crate::special::KummerSettings;
use crate::vec3::R3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ValidateKinematics,
    CalibrateN2,
    SigmaCheck,
    ResidualScan,
    EstimatesCheck,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::ValidateKinematics => "validate-kinematics",
            Scenario::CalibrateN2 => "calibrate-n2",
            Scenario::SigmaCheck => "sigma-check",
            Scenario::ResidualScan => "residual-scan",
            Scenario::EstimatesCheck => "estimates-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    pub a0: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecompositionConfig {
    pub clusters: Vec<Vec<usize>>,
    pub realizations: Option<Vec<Realization>>,
    /// Inclusion order inside each cluster, 1-based particle indices.
    pub cluster_orders: Option<Vec<Vec<usize>>>,
    /// Order of the units joined by the separating coordinates: "c2" for
    /// cluster 2, "p5" for particle 5.
    pub unit_order: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnitudeRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentaConfig {
    /// One momentum per Jacobi coordinate, in basis order.
    pub explicit: Option<Vec<[f64; 3]>>,
    /// Random directions with magnitudes drawn uniformly from the range.
    pub random: Option<MagnitudeRange>,
}

impl Default for MomentaConfig {
    fn default() -> Self {
        Self {
            explicit: None,
            random: Some(MagnitudeRange { min: 0.5, max: 1.5 }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzConfig {
    pub delta_cone: f64,
    pub eps_node: f64,
    pub cross_factor: CrossFactor,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self {
            delta_cone: DEFAULT_DELTA_CONE,
            eps_node: DEFAULT_EPS_NODE,
            cross_factor: CrossFactor::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Bound on the cluster coordinates.
    pub omega: f64,
    pub rays: usize,
    /// Defaults to 1e2 (1 + omega).
    pub r_min: Option<f64>,
    /// Defaults to 1e4 (1 + omega).
    pub r_max: Option<f64>,
    pub points: usize,
    /// Explicit cluster coordinates; requires rays = 1.
    pub y: Option<Vec<[f64; 3]>>,
    /// Explicit separating direction, normalized on load; requires rays = 1.
    pub direction: Option<Vec<[f64; 3]>>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            omega: 0.0,
            rays: 1,
            r_min: None,
            r_max: None,
            points: crate::residual::scan::DEFAULT_POINTS,
            y: None,
            direction: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaConfig {
    pub points: usize,
    pub step: f64,
    /// Cluster coordinates are drawn with |y| in [0.5, y_max].
    pub y_max: f64,
    /// Length of the separating block at each sample.
    pub separation: f64,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        Self {
            points: crate::tolerances::SIGMA_POINTS,
            step: SIGMA_STEP,
            y_max: 3.0,
            separation: 1e3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicsConfig {
    pub configurations: usize,
    pub scale: f64,
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        Self {
            configurations: crate::tolerances::KINEMATICS_CONFIGURATIONS,
            scale: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, overridden by the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub system: SystemConfig,
    #[serde(default)]
    pub decomposition: DecompositionConfig,
    #[serde(default)]
    pub momenta: MomentaConfig,
    #[serde(default)]
    pub ansatz: AnsatzConfig,
    #[serde(default)]
    pub kummer: KummerSettings,
    #[serde(default)]
    pub steps: StepPolicy,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub calibration: CalibrationSpec,
    #[serde(default)]
    pub sigma: SigmaConfig,
    #[serde(default)]
    pub kinematics: KinematicsConfig,
}

/// Independent random streams, so that changing one part of a run does not
/// shift the draws of another.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Momenta = 1,
    Rays = 2,
    Samples = 3,
}

pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

pub fn random_unit<R: Rng>(rng: &mut R) -> R3 {
    loop {
        let v = R3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn vecs(v: &[[f64; 3]]) -> Vec<R3> {
    v.iter().map(|a| R3::new(a[0], a[1], a[2])).collect()
}

fn parse_unit(s: &str, n: usize, l: usize) -> Result<Unit> {
    let bad = || Error::Configuration(format!("unit '{s}' is neither cN (cluster) nor pN (particle)"));
    let (kind, idx) = s.split_at(1);
    let i: usize = idx.parse().map_err(|_| bad())?;
    match kind {
        "c" if (1..=l).contains(&i) => Ok(Unit::Cluster(i - 1)),
        "p" if (1..=n).contains(&i) => Ok(Unit::Particle(i - 1)),
        "c" | "p" => Err(Error::Configuration(format!("unit '{s}' is out of range"))),
        _ => Err(bad()),
    }
}

/// A validated configuration with everything built.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub system: ParticleSystem,
    pub basis: JacobiBasis,
    pub model: AnsatzModel,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn settings(&self) -> AnsatzSettings {
        AnsatzSettings {
            delta_cone: self.ansatz.delta_cone,
            eps_node: self.ansatz.eps_node,
            cross_factor: self.ansatz.cross_factor,
            kummer: self.kummer,
        }
    }

    pub fn basis(&self) -> Result<(ParticleSystem, JacobiBasis)> {
        let system = ParticleSystem::new(self.system.n, self.system.a0)?;
        let d = ClusterDecomposition::from_one_based(system.n(), &self.decomposition.clusters)?;
        let mut spec = JacobiBasisSpec::default_for(&d);
        if let Some(orders) = &self.decomposition.cluster_orders {
            spec.cluster_orders = orders
                .iter()
                .map(|o| {
                    o.iter()
                        .map(|&p| {
                            p.checked_sub(1)
                                .ok_or_else(|| Error::Configuration("particle indices are 1-based".into()))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
        }
        if let Some(units) = &self.decomposition.unit_order {
            spec.unit_order = units
                .iter()
                .map(|u| parse_unit(u, system.n(), d.l()))
                .collect::<Result<_>>()?;
        }
        let basis = build_jacobi_basis(&system, &d, &spec)?;
        Ok((system, basis))
    }

    pub fn momenta(&self, dof: usize) -> Result<Vec<R3>> {
        match (&self.momenta.explicit, &self.momenta.random) {
            (Some(q), None) => {
                if q.len() != dof {
                    return Err(Error::Configuration(format!("{} momenta given, {dof} needed", q.len())));
                }
                Ok(vecs(q))
            }
            (None, Some(r)) => {
                if !(r.min > 0.0 && r.max >= r.min) {
                    return Err(Error::Configuration(format!(
                        "bad momentum range [{}, {}]",
                        r.min, r.max
                    )));
                }
                let mut g = rng(self.seed, Stream::Momenta);
                Ok((0..dof)
                    .map(|_| {
                        let m = if r.max > r.min {
                            g.gen_range(r.min..r.max)
                        } else {
                            r.min
                        };
                        random_unit(&mut g) * m
                    })
                    .collect())
            }
            _ => Err(Error::Configuration(
                "give exactly one of momenta.explicit and momenta.random".into(),
            )),
        }
    }

    pub fn prepare(&self) -> Result<Experiment> {
        let (system, basis) = self.basis()?;
        let d = basis.decomposition();
        let realizations = match &self.decomposition.realizations {
            Some(r) if r.len() != d.l() => {
                return Err(Error::Configuration(format!(
                    "{} realizations for {} clusters",
                    r.len(),
                    d.l()
                )))
            }
            Some(r) => r.clone(),
            None => d.sizes().into_iter().map(Realization::default_for).collect(),
        };
        let chis = realizations
            .iter()
            .zip(d.sizes())
            .map(|(r, m)| r.build(m, system.a0()))
            .collect::<Result<Vec<_>>>()?;
        let q = self.momenta(basis.dof())?;
        if !self.ansatz.delta_cone.is_finite() || !(0.0..2.0).contains(&self.ansatz.delta_cone) {
            return Err(Error::Configuration(format!(
                "delta_cone = {} outside [0, 2)",
                self.ansatz.delta_cone
            )));
        }
        if !(self.ansatz.eps_node > 0.0 && self.ansatz.eps_node < 1.0) {
            return Err(Error::Configuration(format!(
                "eps_node = {} outside (0, 1)",
                self.ansatz.eps_node
            )));
        }
        let q_norm = q.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        self.steps.z_step(1.0, q_norm)?;
        let model = AnsatzModel::new(basis.clone(), chis, q, self.settings())?;
        self.validate_scenario(&basis)?;
        Ok(Experiment {
            config: self.clone(),
            system,
            basis,
            model,
        })
    }

    fn validate_scenario(&self, basis: &JacobiBasis) -> Result<()> {
        let s = &self.scan;
        if s.rays == 0 {
            return Err(Error::Configuration("scan.rays must be positive".into()));
        }
        if (s.y.is_some() || s.direction.is_some()) && s.rays != 1 {
            return Err(Error::Configuration("an explicit ray needs scan.rays = 1".into()));
        }
        match self.scenario {
            Scenario::CalibrateN2 => {
                if self.system.n != 2 {
                    return Err(Error::Configuration("calibrate-n2 needs n = 2".into()));
                }
                let c = &self.calibration;
                if c.points == 0 || c.halvings == 0 || !(c.h0 > 0.0) || !(c.x_min > 0.0 && c.x_max > c.x_min) {
                    return Err(Error::Configuration("bad calibration settings".into()));
                }
            }
            Scenario::SigmaCheck => {
                if basis.decomposition().l() == 0 {
                    return Err(Error::Configuration("sigma-check needs at least one cluster".into()));
                }
                if self.sigma.points == 0 || !(self.sigma.step > 0.0) || !(self.sigma.y_max > 0.5) {
                    return Err(Error::Configuration("bad sigma settings".into()));
                }
            }
            Scenario::ResidualScan | Scenario::EstimatesCheck => {
                // a representative ray must pass the scan validation
                let spec = self.ray_spec(basis, vec![R3::zeros(); basis.z_rows().start], unit_direction(basis));
                spec.validate(basis)?;
            }
            Scenario::ValidateKinematics => {
                if self.kinematics.configurations == 0 || !(self.kinematics.scale > 0.0) {
                    return Err(Error::Configuration("bad kinematics settings".into()));
                }
            }
        }
        Ok(())
    }

    /// Scan spec for one ray with the configured grid and exclusions.
    pub fn ray_spec(&self, _basis: &JacobiBasis, y: Vec<R3>, direction: Vec<R3>) -> crate::residual::RayScanSpec {
        let s = &self.scan;
        let mut spec = crate::residual::RayScanSpec::new(y, direction, s.omega);
        if let Some(r) = s.r_min {
            spec.r_min = r;
        }
        if let Some(r) = s.r_max {
            spec.r_max = r;
        }
        spec.points = s.points;
        spec.steps = self.steps;
        spec.delta_cone = self.ansatz.delta_cone;
        spec.eps_node = self.ansatz.eps_node;
        spec
    }

    /// The rays of the run: the explicit one, or seeded random ones.
    pub fn rays(&self, model: &AnsatzModel) -> Result<Vec<(Vec<R3>, Vec<R3>)>> {
        let basis = model.basis();
        let z = basis.z_rows();
        let mut g = rng(self.seed, Stream::Rays);
        if self.scan.y.is_some() || self.scan.direction.is_some() {
            let y = match &self.scan.y {
                Some(y) => vecs(y),
                None => vec![R3::zeros(); z.start],
            };
            let dir = match &self.scan.direction {
                Some(d) => {
                    let d = vecs(d);
                    let norm = d.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
                    if !(norm > 0.0) {
                        return Err(Error::Configuration("scan.direction is zero".into()));
                    }
                    d.iter().map(|v| v / norm).collect()
                }
                None => crate::residual::random_ray(model, self.scan.omega, self.ansatz.delta_cone, &mut g)?.1,
            };
            return Ok(vec![(y, dir)]);
        }
        (0..self.scan.rays)
            .map(|_| crate::residual::random_ray(model, self.scan.omega, self.ansatz.delta_cone, &mut g))
            .collect()
    }
}

fn unit_direction(basis: &JacobiBasis) -> Vec<R3> {
    let z = basis.z_rows();
    let s = 1.0 / (z.len() as f64).sqrt();
    z.map(|_| R3::new(0.0, 0.0, s)).collect()
}
