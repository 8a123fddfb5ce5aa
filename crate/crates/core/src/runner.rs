//! Scenario execution, sweeps and report files.

use crate::config::{random_unit, rng, Experiment, ExperimentConfig, Scenario, Stream};
use crate::error::{Error, Result};
use crate::kinematics::{build_jacobi_basis, identity_check, ClusterDecomposition, JacobiBasisSpec};
use crate::residual::{calibrate_n2, intermediate_estimates_check, ray_scan, s_alpha, DecayReport};
use crate::tolerances::{self as tol, criterion};
use crate::vec3::R3;
use rand::Rng;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

/// Exit status for an error: 2 for bad input, 3 for a numerical abort.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Configuration(_) | Error::Parse(_) | Error::Misuse(_) => 2,
        _ => 3,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within { center: f64, tol: f64 },
}

impl Bound {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Within { center, tol } => (v - center).abs() <= tol,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
            Bound::Within { center, tol } => write!(f, "{center} +- {tol}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub criterion: &'static str,
    pub measured: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, criterion: &'static str, measured: f64, bound: Bound) -> Self {
        Self {
            name: name.into(),
            criterion,
            measured,
            bound,
            pass: bound.holds(measured),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("scenario: {}\n", self.scenario);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {} ({}): measured {:.6e}, required {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.criterion,
                c.measured,
                c.bound
            );
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "artifact: {}", a.display());
        }
        let _ = writeln!(s, "wall time: {:.3} s", self.wall_time.as_secs_f64());
        let _ = writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    fn checks_csv(&self) -> String {
        let mut s = String::from("# checks/1\nname,criterion,measured,bound,pass\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},{:.17e},{},{}",
                c.name, c.criterion, c.measured, c.bound, c.pass
            );
        }
        s
    }
}

struct Output {
    dir: PathBuf,
    artifacts: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text)?;
        self.artifacts.push(path);
        Ok(())
    }
}

/// Runs the configured scenario and writes its artifacts into `dir`.
/// The configuration is fully validated before anything is written.
pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<RunReport> {
    let start = Instant::now();
    let exp = config.prepare()?;
    log::debug!("momenta {:?}", exp.model.momenta());
    let mut out = Output::new(dir)?;
    let checks = match config.scenario {
        Scenario::ValidateKinematics => validate_kinematics(&exp, &mut out)?,
        Scenario::CalibrateN2 => calibration(&exp, &mut out)?,
        Scenario::SigmaCheck => sigma_check(&exp, &mut out)?,
        Scenario::ResidualScan => residual_scan(&exp, &mut out)?,
        Scenario::EstimatesCheck => estimates_check(&exp, &mut out)?,
    };
    finish(config.scenario.name().to_string(), checks, out, start)
}

fn finish(scenario: String, checks: Vec<Check>, mut out: Output, start: Instant) -> Result<RunReport> {
    let mut report = RunReport {
        scenario,
        checks,
        artifacts: Vec::new(),
        wall_time: Duration::ZERO,
    };
    out.write("checks.csv", &report.checks_csv())?;
    report.artifacts = out.artifacts.clone();
    report.artifacts.push(out.dir.join("summary.txt"));
    report.wall_time = start.elapsed();
    std::fs::write(out.dir.join("summary.txt"), report.summary())?;
    Ok(report)
}

fn validate_kinematics(exp: &Experiment, out: &mut Output) -> Result<Vec<Check>> {
    let c = &exp.config;
    let n = exp.system.n();
    let singles = ClusterDecomposition::all_singletons(n);
    let other = build_jacobi_basis(&exp.system, &singles, &JacobiBasisSpec::default_for(&singles))?;
    let mut g = rng(c.seed, Stream::Samples);
    let r = identity_check(
        &exp.basis,
        &other,
        c.kinematics.configurations,
        c.kinematics.scale,
        &mut g,
    )?;

    let cm = exp.basis.coefficients();
    let mut csv = String::from("# zeta/1\ni,j,kind");
    for k in 0..exp.basis.dof() {
        let _ = write!(csv, ",zeta_{}", k + 1);
    }
    csv.push('\n');
    for alpha in 0..cm.len() {
        let (i, j) = cm.pair(alpha);
        let kind = if cm.is_within(alpha) { "within" } else { "cross" };
        let _ = write!(csv, "{},{},{kind}", i + 1, j + 1);
        for z in cm.row(alpha) {
            let _ = write!(csv, ",{z:.17e}");
        }
        csv.push('\n');
    }
    out.write("zeta.csv", &csv)?;

    let k = criterion::KINEMATICS;
    Ok(vec![
        Check::new(
            "pair reconstruction / scale",
            k,
            r.reconstruction,
            Bound::AtMost(tol::RECONSTRUCTION_TOL),
        ),
        Check::new("|sum zeta^2 - 1|", k, r.zeta_norm, Bound::AtMost(tol::ZETA_NORM_TOL)),
        Check::new("|B B^T - 2I|", k, r.gram, Bound::AtMost(tol::ORTHOGONALITY_TOL)),
        Check::new("|R^T R - I|", k, r.orthogonality, Bound::AtMost(tol::ORTHOGONALITY_TOL)),
        Check::new(
            "basis change transport / scale",
            k,
            r.transport,
            Bound::AtMost(tol::RECONSTRUCTION_TOL),
        ),
    ])
}

fn calibration(exp: &Experiment, out: &mut Output) -> Result<Vec<Check>> {
    let c = &exp.config;
    let points = calibrate_n2(exp.system.a0(), &c.calibration, c.seed)?;
    let mut csv = String::from("# calibration/1\npoint,abs_x,abs_k,h,residual,ratio\n");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let ratios = p.ratios();
        for (s, (h, r)) in p.steps.iter().zip(&p.residuals).enumerate() {
            let ratio = if s == 0 { f64::NAN } else { ratios[s - 1] };
            let _ = writeln!(
                csv,
                "{i},{:.17e},{:.17e},{h:.17e},{r:.17e},{ratio:.17e}",
                p.x.norm(),
                p.k.norm()
            );
        }
        for r in ratios {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    out.write("calibration.csv", &csv)?;
    let k = criterion::CALIBRATION;
    Ok(vec![
        Check::new(
            "smallest halving ratio",
            k,
            lo,
            Bound::AtLeast(tol::CALIBRATION_RATIO_MIN),
        ),
        Check::new(
            "largest halving ratio",
            k,
            hi,
            Bound::AtMost(tol::CALIBRATION_RATIO_MAX),
        ),
    ])
}

/// Random X with cluster coordinates of moderate size and a long
/// separating block.
fn sigma_sample<R: Rng>(exp: &Experiment, g: &mut R) -> Vec<R3> {
    let c = &exp.config.sigma;
    let z = exp.basis.z_rows();
    let zn = (z.len() as f64).sqrt();
    (0..exp.basis.dof())
        .map(|k| {
            if z.contains(&k) {
                random_unit(g) * (c.separation / zn)
            } else {
                random_unit(g) * g.gen_range(0.5..c.y_max)
            }
        })
        .collect()
}

fn sigma_check(exp: &Experiment, out: &mut Output) -> Result<Vec<Check>> {
    let c = &exp.config;
    let model = &exp.model;
    let basis = &exp.basis;
    let q = model.momenta();
    let mut g = rng(c.seed, Stream::Samples);
    let mut csv =
        String::from("# sigma/1\npoint,i,j,cluster_coordinate,abs_sigma,scale,abs_simplified,route_difference\n");
    let mut worst_sigma = 0.0f64;
    let mut worst_route = 0.0f64;
    for point in 0..c.sigma.points {
        let mut tries = 0;
        let values = loop {
            let x = sigma_sample(exp, &mut g);
            let r: Result<Vec<_>> = basis
                .coefficients()
                .cross()
                .map(|alpha| s_alpha(model, &x, alpha, c.sigma.step))
                .collect();
            match r {
                Err(Error::Node { .. }) if tries < 100 => tries += 1,
                other => break other?,
            }
        };
        for s in values {
            worst_route = worst_route.max(s.route_difference());
            for t in &s.sigma {
                // the momenta of the cluster owning this sigma
                let j = basis
                    .decomposition()
                    .cluster_of(s.pair.0)
                    .or_else(|| basis.decomposition().cluster_of(s.pair.1))
                    .ok_or_else(|| Error::Misuse("sigma outside any cluster".into()))?;
                let p: f64 = q[basis.cluster_rows(j)]
                    .iter()
                    .map(|v| v.norm_squared())
                    .sum::<f64>()
                    .sqrt();
                let scale = t.chi.norm() * (1.0 + p);
                worst_sigma = worst_sigma.max(t.sigma.norm() / scale);
                let _ = writeln!(
                    csv,
                    "{point},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
                    s.pair.0 + 1,
                    s.pair.1 + 1,
                    t.omega + 1,
                    t.sigma.norm(),
                    scale,
                    t.simplified.norm(),
                    s.route_difference()
                );
            }
        }
    }
    out.write("sigma.csv", &csv)?;
    let k = criterion::SIGMA;
    Ok(vec![
        Check::new(
            "max |sigma| / (|chi| (1 + |P|))",
            k,
            worst_sigma,
            Bound::AtMost(tol::SIGMA_TOL),
        ),
        Check::new("max route difference", k, worst_route, Bound::AtMost(tol::ROUTE_TOL)),
    ])
}

/// Scans every configured ray.
pub fn scan_rays(exp: &Experiment) -> Result<Vec<DecayReport>> {
    let c = &exp.config;
    c.rays(&exp.model)?
        .into_iter()
        .enumerate()
        .map(|(i, (y, dir))| {
            let rep = ray_scan(&exp.model, &c.ray_spec(&exp.basis, y, dir))?;
            log::debug!(
                "ray {}: slope {:.3} +- {:.3}, {} excluded",
                i + 1,
                rep.slope,
                rep.slope_se,
                rep.excluded.len()
            );
            Ok(rep)
        })
        .collect()
}

/// Checks of one decay report.
pub fn decay_checks(exp: &Experiment, label: &str, rep: &DecayReport) -> Vec<Check> {
    let n = exp.system.n();
    if n == 2 {
        let floor = rep.points.iter().filter_map(|p| p.ratio()).fold(0.0, f64::max);
        return vec![Check::new(
            format!("{label}: exact-solution calibration, max |S/Psi|"),
            criterion::CALIBRATION,
            floor,
            Bound::AtMost(tol::EXACT_FLOOR),
        )];
    }
    let k = if exp.basis.decomposition().l() == 0 {
        criterion::DECAY_SEPARATED
    } else {
        criterion::DECAY_CLUSTERS
    };
    let mut checks = vec![Check::new(
        format!("{label}: slope"),
        k,
        rep.slope,
        Bound::AtMost(tol::DECAY_SLOPE_MAX),
    )];
    if exp.system.a0() > 0.0 {
        checks.push(Check::new(
            format!("{label}: potential slope"),
            k,
            rep.potential_slope,
            Bound::Within {
                center: tol::POTENTIAL_SLOPE,
                tol: tol::POTENTIAL_SLOPE_TOL,
            },
        ));
        checks.push(Check::new(
            format!("{label}: slope - potential slope"),
            k,
            rep.slope - rep.potential_slope,
            Bound::AtMost(-tol::DOMINANCE_MARGIN),
        ));
    }
    checks
}

fn ray_row(csv: &mut String, lead: &str, rep: &DecayReport) {
    let _ = writeln!(
        csv,
        "{lead},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{:.17e},{:.17e}",
        rep.slope,
        rep.slope_se,
        rep.potential_slope,
        rep.potential_slope_se,
        rep.used,
        rep.excluded.len(),
        rep.r_range.0,
        rep.r_range.1
    );
}

const RAY_COLUMNS: &str = "slope,slope_se,potential_slope,potential_slope_se,used,excluded,r_lo,r_hi";

fn residual_scan(exp: &Experiment, out: &mut Output) -> Result<Vec<Check>> {
    let reports = scan_rays(exp)?;
    let mut rays = format!("# rays/1\nray,{RAY_COLUMNS}\n");
    let mut checks = Vec::new();
    for (i, rep) in reports.iter().enumerate() {
        out.write(&format!("scan_ray{:02}.csv", i + 1), &rep.csv())?;
        ray_row(&mut rays, &(i + 1).to_string(), rep);
        checks.extend(decay_checks(exp, &format!("ray {}", i + 1), rep));
    }
    out.write("rays.csv", &rays)?;
    Ok(checks)
}

fn estimates_check(exp: &Experiment, out: &mut Output) -> Result<Vec<Check>> {
    let c = &exp.config;
    let mut csv = String::from("# estimates/1\nray,i,j,slope_r1,slope_r2\n");
    let mut checks = Vec::new();
    for (i, (y, dir)) in c.rays(&exp.model)?.into_iter().enumerate() {
        let spec = c.ray_spec(&exp.basis, y, dir);
        let samples: Vec<Vec<R3>> = spec.grid().iter().map(|r| spec.point(*r)).collect();
        let rep = intermediate_estimates_check(&exp.basis, &samples, exp.model.momenta())?;
        for p in &rep.pairs {
            let s = |r: &crate::residual::estimates::Remainder| {
                r.fit.map_or(String::new(), |f| format!("{:.17e}", f.slope))
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                i + 1,
                p.pair.0 + 1,
                p.pair.1 + 1,
                s(&p.first),
                s(&p.second)
            );
        }
        // an exactly vanishing remainder counts as passing
        let worst = rep.worst_slope().unwrap_or(f64::NEG_INFINITY);
        checks.push(Check::new(
            format!("ray {}: worst remainder slope", i + 1),
            criterion::ESTIMATES,
            worst,
            Bound::AtMost(tol::REMAINDER_SLOPE_MAX),
        ));
    }
    out.write("estimates.csv", &csv)?;
    Ok(checks)
}

/// Scalar parameters a sweep may vary.
pub const SWEEP_AXES: [&str; 5] = ["delta_cone", "omega", "h", "r_max", "a0"];

/// Sets one sweep axis; `h` is the floor of the step policy.
pub fn set_axis(config: &mut ExperimentConfig, axis: &str, value: f64) -> Result<()> {
    match axis {
        "delta_cone" => config.ansatz.delta_cone = value,
        "omega" => config.scan.omega = value,
        "h" => config.steps.floor = value,
        "r_max" => config.scan.r_max = Some(value),
        "a0" => config.system.a0 = value,
        other => {
            return Err(Error::Configuration(format!(
                "'{other}' is not sweepable; choose one of {}",
                SWEEP_AXES.join(", ")
            )))
        }
    }
    Ok(())
}

/// Runs the residual scan once per value of one parameter and writes an
/// aggregated CSV with a gnuplot script for slope against the parameter.
pub fn sweep(config: &ExperimentConfig, axis: &str, values: &[f64], dir: &Path) -> Result<RunReport> {
    let start = Instant::now();
    if config.scenario != Scenario::ResidualScan {
        return Err(Error::Configuration("sweeps run the residual-scan scenario".into()));
    }
    if values.is_empty() {
        return Err(Error::Configuration("sweep needs at least one value".into()));
    }
    let mut prepared = Vec::with_capacity(values.len());
    for &v in values {
        let mut c = config.clone();
        set_axis(&mut c, axis, v)?;
        prepared.push((v, c.prepare()?));
    }
    let mut out = Output::new(dir)?;
    let mut csv = format!("# sweep/1 axis={axis}\nvalue,ray,{RAY_COLUMNS}\n");
    let mut checks = Vec::new();
    for (v, exp) in &prepared {
        for (i, rep) in scan_rays(exp)?.iter().enumerate() {
            ray_row(&mut csv, &format!("{v:.17e},{}", i + 1), rep);
            checks.extend(decay_checks(exp, &format!("{axis}={v} ray {}", i + 1), rep));
        }
    }
    let name = format!("sweep_{axis}");
    out.write(&format!("{name}.csv"), &csv)?;
    let script = format!(
        "set datafile separator ','\n\
         set key off\n\
         set xlabel '{axis}'\n\
         set ylabel 'fitted slope of |S/Psi|'\n\
         set terminal pngcairo size 800,600\n\
         set output '{name}.png'\n\
         plot '{name}.csv' skip 2 using 1:3:4 with yerrorbars pt 7, \\\n\
         \x20    '' skip 2 using 1:5 with points pt 4\n"
    );
    out.write(&format!("{name}.gp"), &script)?;
    finish(format!("sweep {axis}"), checks, out, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(text).unwrap()
    }

    #[test]
    fn calibration_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let c = config("scenario = \"calibrate-n2\"\n[system]\nn = 2\na0 = 1.0\n[calibration]\npoints = 4\n");
        let rep = run(&c, dir.path()).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
        assert!(dir.path().join("calibration.csv").exists());
        assert!(dir.path().join("summary.txt").exists());
    }

    #[test]
    fn kinematics_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(
            "scenario = \"validate-kinematics\"\n[system]\nn = 5\na0 = 1.0\n[decomposition]\nclusters = [[1, 3], [2, 4, 5]]\n[kinematics]\nconfigurations = 50\n",
        );
        let rep = run(&c, dir.path()).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
        let zeta = std::fs::read_to_string(dir.path().join("zeta.csv")).unwrap();
        assert_eq!(zeta.lines().count(), 2 + 10);
    }

    #[test]
    fn scan_is_deterministic() {
        let text = "scenario = \"residual-scan\"\nseed = 11\n[system]\nn = 3\na0 = 1.0\n[scan]\nrays = 2\npoints = 6\n";
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ra = run(&config(text), a.path()).unwrap();
        run(&config(text), b.path()).unwrap();
        for f in ["scan_ray01.csv", "scan_ray02.csv", "rays.csv", "checks.csv"] {
            let x = std::fs::read(a.path().join(f)).unwrap();
            let y = std::fs::read(b.path().join(f)).unwrap();
            assert_eq!(x, y, "{f}");
        }
        assert!(ra.passed(), "{}", ra.summary());
    }

    #[test]
    fn report_is_recomputable_from_csv() {
        let text = "scenario = \"residual-scan\"\nseed = 2\n[system]\nn = 3\na0 = 1.0\n";
        let dir = tempfile::tempdir().unwrap();
        run(&config(text), dir.path()).unwrap();
        let scan = std::fs::read_to_string(dir.path().join("scan_ray01.csv")).unwrap();
        let (mut r, mut s) = (Vec::new(), Vec::new());
        for line in scan.lines().skip(2) {
            let f: Vec<&str> = line.split(',').collect();
            if f[5] == "ok" {
                r.push(f[0].parse::<f64>().unwrap());
                s.push(f[3].parse::<f64>().unwrap());
            }
        }
        let fit = crate::fit::loglog(&r, &s).unwrap();
        let rays = std::fs::read_to_string(dir.path().join("rays.csv")).unwrap();
        let slope: f64 = rays.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!((fit.slope - slope).abs() < 1e-12);
    }

    #[test]
    fn malformed_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out");
        let c = config("scenario = \"residual-scan\"\n[system]\nn = 1\na0 = 1.0\n");
        let e = run(&c, &target).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        assert!(!target.exists());
    }

    #[test]
    fn sweep_axes() {
        let c = config("scenario = \"residual-scan\"\n[system]\nn = 3\na0 = 1.0\n[scan]\npoints = 6\n");
        let dir = tempfile::tempdir().unwrap();
        let e = sweep(&c, "seed", &[1.0], dir.path()).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let rep = sweep(&c, "a0", &[0.5, 1.0, 2.0], dir.path()).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
        let csv = std::fs::read_to_string(dir.path().join("sweep_a0.csv")).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(dir.path().join("sweep_a0.gp").exists());
    }
}
