//! Thresholds of the acceptance criteria. Run reports and the acceptance
//! test both read them from here, so every reported threshold has one source.

/// Criterion identifiers as they appear in reports.
pub mod criterion {
    pub const KINEMATICS: &str = "C1 kinematics identities";
    pub const SPECIAL_FUNCTIONS: &str = "C2 special-function accuracy";
    pub const CALIBRATION: &str = "C3 two-body calibration";
    pub const SIGMA: &str = "C4 sigma identity";
    pub const DECAY_SEPARATED: &str = "C5 decay, fully separated";
    pub const DECAY_CLUSTERS: &str = "C6 decay, cluster configurations";
    pub const CONSISTENCY: &str = "C7 asymptotic consistency";
    pub const ESTIMATES: &str = "C8 intermediate estimates";
}

// C1
pub const KINEMATICS_PARTICLES: std::ops::RangeInclusive<usize> = 2..=8;
pub const KINEMATICS_CONFIGURATIONS: usize = 1000;
pub const RECONSTRUCTION_TOL: f64 = 1e-12;
pub const ZETA_NORM_TOL: f64 = 1e-12;
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

// C2
pub const KUMMER_REL_TOL: f64 = 1e-10;
pub const KUMMER_ODE_TOL: f64 = 1e-8;
pub const KUMMER_GRID_POINTS: usize = 200;

// C3
pub const CALIBRATION_RATIO_MIN: f64 = 12.0;
pub const CALIBRATION_RATIO_MAX: f64 = 20.0;
pub const CALIBRATION_POINTS: usize = 20;
pub const CALIBRATION_HALVINGS: usize = 3;
/// |S/Psi| bound for the exact two-body wave in a ray scan.
pub const EXACT_FLOOR: f64 = 1e-8;

// C4
/// |sigma| < SIGMA_TOL * |chi| * (1 + |P|)
pub const SIGMA_TOL: f64 = 1e-6;
pub const SIGMA_POINTS: usize = 50;
pub const ROUTE_TOL: f64 = 1e-10;

// C5, C6
pub const DECAY_SLOPE_MAX: f64 = -1.7;
pub const POTENTIAL_SLOPE: f64 = -1.0;
pub const POTENTIAL_SLOPE_TOL: f64 = 0.1;
/// The residual slope must also sit this far below the potential slope.
pub const DOMINANCE_MARGIN: f64 = 0.5;
pub const DECAY_RAYS: usize = 10;
pub const DECAY_DELTA_CONE: f64 = 0.05;
pub const CLUSTER_OMEGA: f64 = 2.0;

// C7
pub const CONSISTENCY_MAX_DEVIATION: f64 = 0.05;

// C8
pub const REMAINDER_SLOPE_MAX: f64 = crate::residual::REMAINDER_SLOPE_MAX;
pub const ESTIMATE_RAYS: usize = 10;
