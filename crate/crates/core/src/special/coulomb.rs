//! Coulomb distortion factor Phi(w) = 1F1(-i eta; 1; i w).
//!
//! Phi solves w Phi'' + (1 - i w) Phi' - eta Phi = 0, and
//! e^{i k.x} Phi(|k||x| - k.x) solves the two-body problem
//! -Laplacian + a0/|x| - k^2 when eta = a0 / (2|k|).

use super::gamma::rgamma;
use super::kummer::{kummer_m, KummerSettings};
use crate::error::{Error, Result};
use crate::vec3::R3;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest Sommerfeld parameter accepted.
pub const ETA_MAX: f64 = 50.0;

/// Largest |arg w| accepted outside the series disc. The asymptotic
/// expansion holds for |arg w| < pi; the margin keeps it away from the
/// Stokes line on the negative axis.
pub const MAX_ARG_W: f64 = 0.75 * PI;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SommerfeldParameter(f64);

impl SommerfeldParameter {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || !(0.0..=ETA_MAX).contains(&eta) {
            return Err(Error::Domain(format!(
                "Sommerfeld parameter {eta} outside [0, {ETA_MAX}]"
            )));
        }
        Ok(Self(eta))
    }

    pub fn eta(self) -> f64 {
        self.0
    }

    /// Kummer parameter a = -i eta.
    pub fn kummer_a(self) -> Complex64 {
        Complex64::new(0.0, -self.0)
    }
}

/// eta = a0 / (2 |k|) for the -Laplacian + a0/|x| normalization.
pub fn sommerfeld(a0: f64, k_mag: f64) -> Result<SommerfeldParameter> {
    if !(k_mag > 0.0) || !k_mag.is_finite() {
        return Err(Error::SingularMomentum(k_mag));
    }
    if !(a0 >= 0.0) || !a0.is_finite() {
        return Err(Error::Domain(format!("coupling a0 = {a0} must be >= 0")));
    }
    SommerfeldParameter::new(a0 / (2.0 * k_mag))
}

/// Phi and its w-derivatives at a real argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoulombFactor {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub w: f64,
}

/// Phi at a complex argument, optionally with d/d eta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoulombJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub deta: Option<Complex64>,
    pub w: Complex64,
}

impl CoulombJet {
    /// Residual of w Phi'' + (1 - i w) Phi' - eta Phi, relative to the
    /// largest of |Phi|, |Phi'|, |Phi''|.
    pub fn ode_residual(&self, eta: SommerfeldParameter) -> f64 {
        let r = self.w * self.d2 + (1.0 - I * self.w) * self.d1 - eta.eta() * self.value;
        let scale = self.value.norm().max(self.d1.norm()).max(self.d2.norm());
        r.norm() / scale.max(f64::MIN_POSITIVE)
    }
}

impl CoulombFactor {
    pub fn ode_residual(&self, eta: SommerfeldParameter) -> f64 {
        CoulombJet::from(*self).ode_residual(eta)
    }
}

impl From<CoulombFactor> for CoulombJet {
    fn from(f: CoulombFactor) -> Self {
        Self {
            value: f.value,
            d1: f.d1,
            d2: f.d2,
            deta: None,
            w: Complex64::from(f.w),
        }
    }
}

pub fn kummer(eta: SommerfeldParameter, w: f64) -> Result<CoulombFactor> {
    kummer_with(eta, w, &KummerSettings::default())
}

pub fn kummer_with(eta: SommerfeldParameter, w: f64, settings: &KummerSettings) -> Result<CoulombFactor> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::Domain(format!("Coulomb argument w = {w} must be >= 0")));
    }
    let j = jet(eta, Complex64::from(w), false, settings)?;
    Ok(CoulombFactor {
        value: j.value,
        d1: j.d1,
        d2: j.d2,
        w,
    })
}

/// Phi at complex w, as needed by the complexified cluster arguments.
pub fn kummer_complex(
    eta: SommerfeldParameter,
    w: Complex64,
    with_deta: bool,
    settings: &KummerSettings,
) -> Result<CoulombJet> {
    jet(eta, w, with_deta, settings)
}

/// Value only.
pub fn phi(eta: SommerfeldParameter, w: Complex64, settings: &KummerSettings) -> Result<Complex64> {
    check_w(w, settings)?;
    Ok(kummer_m(eta.kummer_a(), 1, w, false, settings)?.value)
}

/// Validated domain: the series disc, plus the sector |arg w| <= 3pi/4.
fn check_w(w: Complex64, settings: &KummerSettings) -> Result<()> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite Coulomb argument {w}")));
    }
    if w.norm() > settings.series_radius && w.arg().abs() > MAX_ARG_W {
        return Err(Error::Domain(format!(
            "Coulomb argument w = {w} lies outside the validated sector"
        )));
    }
    Ok(())
}

fn jet(eta: SommerfeldParameter, w: Complex64, with_deta: bool, settings: &KummerSettings) -> Result<CoulombJet> {
    check_w(w, settings)?;
    let a = eta.kummer_a();
    let base = kummer_m(a, 1, w, with_deta, settings)?;
    if eta.eta() == 0.0 {
        // a = 0 truncates every series to its constant term
        return Ok(CoulombJet {
            value: Complex64::from(1.0),
            d1: Complex64::from(0.0),
            d2: Complex64::from(0.0),
            deta: base.da.map(|da| -I * da),
            w,
        });
    }
    // Phi'' = -a (a+1)/2 M(a+2, 3, i w)
    let second = kummer_m(a + 2.0, 3, w, false, settings)?;
    Ok(CoulombJet {
        value: base.value,
        d1: base.dw,
        d2: -a * (a + 1.0) / 2.0 * second.value,
        // a = -i eta, so d/d eta = -i d/da
        deta: base.da.map(|da| -I * da),
        w,
    })
}

/// Phi(|k||x| - <k, x>) with eta = a0 / (2|k|).
pub fn coulomb_distortion(x: &R3, k: &R3, a0: f64) -> Result<CoulombFactor> {
    let xn = x.norm();
    let kn = k.norm();
    if !(xn > 0.0) || !(kn > 0.0) {
        return Err(Error::SingularInput(format!(
            "coulomb_distortion needs |x| > 0 and |k| > 0, got {xn}, {kn}"
        )));
    }
    let eta = sommerfeld(a0, kn)?;
    kummer(eta, distortion_argument(x, k))
}

/// |k||x| - <k, x>, written as |k||x| |x^ - k^|^2 / 2 so it stays
/// non-negative and accurate near the forward direction.
pub fn distortion_argument(x: &R3, k: &R3) -> f64 {
    let xn = x.norm();
    let kn = k.norm();
    if xn == 0.0 || kn == 0.0 {
        return 0.0;
    }
    let d = x / xn - k / kn;
    0.5 * kn * xn * d.norm_squared()
}

/// The part of Phi that carries no outgoing e^{i w} wave:
/// e^{-pi eta/2} w^{i eta} / Gamma(1 + i eta) times its asymptotic series.
/// Only defined where that series converges to `asymptotic_tol`.
pub fn regular_component(eta: SommerfeldParameter, w: Complex64, settings: &KummerSettings) -> Result<CoulombJet> {
    check_w(w, settings)?;
    let a = eta.kummer_a();
    let z = I * w;
    let ln_z = z.ln();
    let pref = (I * PI * a).exp() * rgamma(1.0 - a);
    // sum_s c_s z^{-a-s}, c_{s+1} = -c_s (a+s)^2 / (s+1) for b = 1
    let mut c = Complex64::from(1.0);
    let mut value = Complex64::from(0.0);
    let mut d1 = Complex64::from(0.0);
    let mut d2 = Complex64::from(0.0);
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for s in 0..settings.max_terms {
        let sf = s as f64;
        let p = -a - sf;
        let t = c * (p * ln_z).exp();
        let mag = t.norm();
        if mag > prev && s > 1 {
            break;
        }
        value += t;
        d1 += t * p / w;
        d2 += t * p * (p - 1.0) / (w * w);
        prev = mag;
        if mag <= settings.asymptotic_tol * value.norm() {
            converged = true;
            break;
        }
        c *= -(a + sf) * (a + sf) / (sf + 1.0);
    }
    if !converged {
        return Err(Error::Range(format!(
            "regular component at w = {w} is outside the asymptotic regime"
        )));
    }
    Ok(CoulombJet {
        value: pref * value,
        d1: pref * d1,
        d2: pref * d2,
        deta: None,
        w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn sommerfeld_examples() {
        assert_eq!(sommerfeld(2.0, 1.0).unwrap().eta(), 1.0);
        assert_eq!(sommerfeld(1.0, 0.5).unwrap().eta(), 1.0);
        assert_eq!(sommerfeld(0.0, 3.0).unwrap().eta(), 0.0);
        assert!(matches!(sommerfeld(1.0, 0.0), Err(Error::SingularMomentum(_))));
        assert!(matches!(sommerfeld(101.0, 1.0), Err(Error::Domain(_))));
        assert!(sommerfeld(100.0, 1.0).is_ok());
    }

    #[test]
    fn trivial_values() {
        let eta0 = SommerfeldParameter::new(0.0).unwrap();
        for &w in &[0.0, 1.0, 55.0, 5000.0] {
            let f = kummer(eta0, w).unwrap();
            assert_eq!(f.value, Complex64::from(1.0));
            assert_eq!(f.d1, Complex64::from(0.0));
        }
        for &eta in &[0.1, 1.0, 7.0, 50.0] {
            let f = kummer(SommerfeldParameter::new(eta).unwrap(), 0.0).unwrap();
            assert_eq!(f.value, Complex64::from(1.0));
        }
        let eta = SommerfeldParameter::new(1.0).unwrap();
        assert!(matches!(kummer(eta, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn reference_point() {
        // 60-digit Maclaurin summation
        let f = kummer(SommerfeldParameter::new(1.0).unwrap(), 1.0).unwrap();
        let value = Complex64::new(2.204_557_452_042_820_866_5, 0.330_426_674_626_759_305_61);
        let d1 = Complex64::new(1.346_114_161_388_120_655_8, 0.735_385_517_980_316_368_44);
        assert!(rel(f.value, value) < 1e-14);
        assert!(rel(f.d1, d1) < 1e-14);
    }

    #[test]
    fn derivative_matches_differences() {
        let eta = SommerfeldParameter::new(1.3).unwrap();
        for &w in &[0.4, 5.0, 17.0, 300.0] {
            let f = kummer(eta, w).unwrap();
            let mut errs = Vec::new();
            for h in [1e-2, 5e-3] {
                let p = kummer(eta, w + h).unwrap();
                let m = kummer(eta, w - h).unwrap();
                errs.push(((p.value - m.value) / (2.0 * h) - f.d1).norm());
                let d2 = (p.value - 2.0 * f.value + m.value) / (h * h);
                assert!(rel(d2, f.d2) < 1e-3, "w={w}");
            }
            // second-order consistency: halving h quarters the error
            let ratio = errs[0] / errs[1];
            assert!((3.0..5.0).contains(&ratio), "w={w} ratio={ratio}");
        }
    }

    #[test]
    fn distortion_geometry() {
        let k = R3::new(0.3, -0.4, 1.2);
        let x = k * 2.5;
        let f = coulomb_distortion(&x, &k, 1.0).unwrap();
        assert!(f.w < 1e-30);
        assert!((f.value - 1.0).norm() < 1e-15);
        let f = coulomb_distortion(&R3::new(0.0, 4.0, 0.0), &R3::new(0.0, 0.5, 0.0), 1.0).unwrap();
        assert_eq!(f.w, 0.0);
        assert_eq!(f.value, Complex64::from(1.0));
        let k = R3::new(0.0, 0.0, 1.0);
        let x = R3::new(0.0, 0.0, -3.0);
        assert!((distortion_argument(&x, &k) - 6.0).abs() < 1e-15);
        assert!(coulomb_distortion(&R3::zeros(), &k, 1.0).is_err());
        assert!(coulomb_distortion(&x, &R3::zeros(), 1.0).is_err());
    }

    #[test]
    fn complex_sector() {
        let eta = SommerfeldParameter::new(1.0).unwrap();
        let s = KummerSettings::default();
        // small arguments with negative real part go through the series
        let j = kummer_complex(eta, Complex64::new(-0.01, 0.15), false, &s).unwrap();
        assert!(j.ode_residual(eta) < 1e-12);
        // inside the sector, continuation and asymptotics agree
        let w = Complex64::from_polar(40.0, 2.0);
        let j = kummer_complex(eta, w, true, &s).unwrap();
        assert!(j.ode_residual(eta) < 1e-10);
        assert!(kummer_complex(eta, Complex64::new(-30.0, 1.0), false, &s).is_err());
    }

    #[test]
    fn regular_component_is_a_solution() {
        // both pieces of the two-branch split solve the ODE
        let eta = SommerfeldParameter::new(0.8).unwrap();
        let s = KummerSettings::default();
        for &w in &[200.0, 1500.0] {
            let r = regular_component(eta, Complex64::new(w, 0.3), &s).unwrap();
            assert!(r.ode_residual(eta) < 1e-12, "w={w}");
            // the remainder Phi - regular is the outgoing wave ~ e^{i w} w^{-i eta - 1}
            let full = kummer_complex(eta, r.w, false, &s).unwrap();
            let out = full.value - r.value;
            let shape = (I * r.w).exp() * (-(1.0 + I * 0.8) * r.w.ln()).exp();
            let c1 = out / shape;
            let r2 = regular_component(eta, Complex64::new(2.0 * w, 0.3), &s).unwrap();
            let f2 = kummer_complex(eta, r2.w, false, &s).unwrap();
            let shape2 = (I * r2.w).exp() * (-(1.0 + I * 0.8) * r2.w.ln()).exp();
            let c2 = (f2.value - r2.value) / shape2;
            assert!(rel(c1, c2) < 5e-3, "w={w}");
        }
    }
}
