//! Residual of the ansatz under the full Hamiltonian, and the diagnostics
//! built on it.

pub mod discrepancy;
pub mod estimates;
pub mod hamiltonian;
pub mod scan;
pub mod sigma;

pub use discrepancy::{cross_potential, discrepancy, separation, Discrepancy};
pub use estimates::{intermediate_estimates_check, remainders, EstimatesReport, REMAINDER_SLOPE_MAX};
pub use hamiltonian::{apply_hamiltonian, calibrate_n2, CalibrationPoint, CalibrationSpec, StepPolicy};
pub use scan::{random_ray, ray_scan, DecayReport, Exclusion, RayScanSpec, ScanPoint};
pub use sigma::{s_alpha, sigma_coefficient, SAlpha, SigmaTerms, SIGMA_STEP};
