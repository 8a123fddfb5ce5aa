//! Kummer's function M(a, b, i w) = 1F1(a; b; i w) for complex `a`, small
//! positive integer `b` and complex `w` with Re w >= 0.
//!
//! Three evaluation routes:
//!
//! * Maclaurin series for |w| <= `series_radius`.
//! * Taylor continuation of Kummer's equation in `w`,
//!   `w f'' + (b - i w) f' - i a f = 0`, marching radially outward from the
//!   series disc. On the real `w` axis both solutions of the equation stay
//!   bounded, so marching is well conditioned where the Maclaurin series
//!   suffers cancellation.
//! * Two-branch asymptotic expansion with Gamma prefactors, accepted only
//!   when both branches converge to `asymptotic_tol` before their terms start
//!   to grow.
//!
//! Every route also returns d/dw and, on request, the parameter derivative
//! d/da of the function.

use super::gamma::{digamma, rgamma, rgamma_derivative};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KummerSettings {
    /// Largest |w| evaluated by the Maclaurin series.
    pub series_radius: f64,
    /// Largest Taylor step of the continuation route.
    pub max_step: f64,
    /// Relative size of the smallest retained asymptotic term.
    pub asymptotic_tol: f64,
    /// Hard cap on terms in any single series.
    pub max_terms: usize,
}

impl Default for KummerSettings {
    fn default() -> Self {
        Self {
            series_radius: 6.0,
            max_step: 4.0,
            asymptotic_tol: 1e-15,
            max_terms: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series,
    Continuation,
    Asymptotic,
}

/// Value of M(a, b, i w) with its derivatives.
#[derive(Clone, Copy, Debug)]
pub struct KummerValue {
    pub value: Complex64,
    /// d/dw
    pub dw: Complex64,
    /// d/da, when requested
    pub da: Option<Complex64>,
    pub method: Method,
}

/// Evaluate M(a, b, i w), picking the route automatically.
pub fn kummer_m(a: Complex64, b: u32, w: Complex64, with_da: bool, settings: &KummerSettings) -> Result<KummerValue> {
    check_args(b, w)?;
    if a == ZERO && !with_da {
        return Ok(KummerValue {
            value: ONE,
            dw: ZERO,
            da: None,
            method: Method::Series,
        });
    }
    if w.norm() <= settings.series_radius {
        return series(a, b, w, with_da, settings);
    }
    if let Some(v) = asymptotic(a, b, w, with_da, settings)? {
        return Ok(v);
    }
    continuation(a, b, w, with_da, settings)
}

/// Evaluate with a forced route. Used to cross-check the routes against
/// each other in their overlap windows.
pub fn kummer_m_with(
    method: Method,
    a: Complex64,
    b: u32,
    w: Complex64,
    with_da: bool,
    settings: &KummerSettings,
) -> Result<KummerValue> {
    check_args(b, w)?;
    match method {
        Method::Series => series(a, b, w, with_da, settings),
        Method::Continuation => continuation(a, b, w, with_da, settings),
        Method::Asymptotic => asymptotic(a, b, w, with_da, settings)?.ok_or_else(|| {
            Error::Range(format!(
                "asymptotic expansion of M({a}, {b}, i*{w}) did not reach tolerance"
            ))
        }),
    }
}

fn check_args(b: u32, w: Complex64) -> Result<()> {
    if b == 0 {
        return Err(Error::Domain("Kummer parameter b must be positive".into()));
    }
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument w = {w}")));
    }
    Ok(())
}

fn series(a: Complex64, b: u32, w: Complex64, with_da: bool, settings: &KummerSettings) -> Result<KummerValue> {
    series_jet(a, b, w, with_da, settings).map(|(v, _)| v)
}

/// Series value plus d/da of dM/dw (zero unless `with_da`).
fn series_jet(
    a: Complex64,
    b: u32,
    w: Complex64,
    with_da: bool,
    settings: &KummerSettings,
) -> Result<(KummerValue, Complex64)> {
    let z = I * w;
    let bf = b as f64;
    let eps = 1e-17;

    // value: t_n = (a)_n / ((b)_n n!) z^n
    let mut t = ONE;
    let mut dt = ZERO;
    let mut sum = ONE;
    let mut dsum = ZERO;
    // derivative series: e_m = (m+1) c_{m+1} z^m, starting at a / b
    let mut e = a / bf;
    let mut de = Complex64::from(1.0 / bf);
    let mut esum = e;
    let mut desum = de;

    let mut converged = false;
    for n in 0..settings.max_terms {
        let nf = n as f64;
        let scale = z / ((bf + nf) * (nf + 1.0));
        let next_dt = (dt * (a + nf) + t) * scale;
        t *= (a + nf) * scale;
        dt = next_dt;
        sum += t;
        dsum += dt;

        let escale = z / ((bf + nf + 1.0) * (nf + 1.0));
        let next_de = (de * (a + nf + 1.0) + e) * escale;
        e *= (a + nf + 1.0) * escale;
        de = next_de;
        esum += e;
        desum += de;

        let small = |term: Complex64, total: Complex64| term.norm() <= eps * total.norm().max(1e-300);
        if nf > z.norm() && small(t, sum) && small(e, esum) && (!with_da || (small(dt, dsum) && small(de, desum))) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Range(format!(
            "Maclaurin series of M({a}, {b}, i*{w}) hit the {}-term cap",
            settings.max_terms
        )));
    }
    let value = KummerValue {
        value: sum,
        dw: I * esum,
        da: with_da.then_some(dsum),
        method: Method::Series,
    };
    Ok((value, if with_da { I * desum } else { ZERO }))
}

/// Taylor coefficients of f (and of g = df/da) about w0, evaluated at w0 + h.
struct Jet {
    f: Complex64,
    df: Complex64,
    g: Complex64,
    dg: Complex64,
}

fn taylor_step(
    a: Complex64,
    bf: f64,
    w0: Complex64,
    h: Complex64,
    jet: &Jet,
    with_da: bool,
    max_terms: usize,
) -> Result<Jet> {
    let eps = 1e-17;
    // c_n: coefficients of f, d_n: of g
    let (mut c0, mut c1) = (jet.f, jet.df);
    let (mut d0, mut d1) = (jet.g, jet.dg);
    let mut f = c0 + c1 * h;
    let mut df = c1;
    let mut g = d0 + d1 * h;
    let mut dg = d1;
    let mut hp = h; // h^(n+1) after the update below
    let mut quiet = 0;
    for n in 0..max_terms {
        let nf = n as f64;
        let denom = w0 * ((nf + 2.0) * (nf + 1.0));
        let lin = (nf + 1.0) * (Complex64::from(nf + bf) - I * w0);
        let c2 = -(lin * c1 - I * (a + nf) * c0) / denom;
        let d2 = if with_da {
            -(lin * d1 - I * (a + nf) * d0 - I * c0) / denom
        } else {
            ZERO
        };
        // term h^(n+2) for value, (n+2) h^(n+1) for derivative
        let dterm_f = c2 * hp * (nf + 2.0);
        let dterm_g = d2 * hp * (nf + 2.0);
        hp *= h;
        let term_f = c2 * hp;
        let term_g = d2 * hp;
        f += term_f;
        df += dterm_f;
        g += term_g;
        dg += dterm_g;
        c0 = c1;
        c1 = c2;
        d0 = d1;
        d1 = d2;
        let small = term_f.norm() <= eps * f.norm()
            && dterm_f.norm() <= eps * df.norm().max(f.norm())
            && (!with_da
                || (term_g.norm() <= eps * g.norm().max(f.norm()) && dterm_g.norm() <= eps * dg.norm().max(f.norm())));
        if small {
            quiet += 1;
            if quiet >= 2 {
                return Ok(Jet { f, df, g, dg });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Range(format!(
        "Taylor continuation step at w0 = {w0} did not converge"
    )))
}

fn continuation(a: Complex64, b: u32, w: Complex64, with_da: bool, settings: &KummerSettings) -> Result<KummerValue> {
    let radius = w.norm();
    if radius <= settings.series_radius {
        return series(a, b, w, with_da, settings);
    }
    let dir = w / radius;
    let start = dir * settings.series_radius;
    let (s, dg) = series_jet(a, b, start, with_da, settings)?;
    let mut jet = Jet {
        f: s.value,
        df: s.dw,
        g: s.da.unwrap_or(ZERO),
        dg,
    };
    let bf = b as f64;
    let mut w0 = start;
    loop {
        let remaining = w - w0;
        let dist = remaining.norm();
        if dist == 0.0 {
            break;
        }
        let limit = settings.max_step.min(0.5 * w0.norm());
        let h = if dist <= limit {
            remaining
        } else {
            remaining * (limit / dist)
        };
        jet = taylor_step(a, bf, w0, h, &jet, with_da, settings.max_terms)?;
        w0 = if dist <= limit { w } else { w0 + h };
    }
    Ok(KummerValue {
        value: jet.f,
        dw: jet.df,
        da: with_da.then_some(jet.g),
        method: Method::Continuation,
    })
}

/// Sum of an asymptotic series with ratio r_k(a) between consecutive terms.
/// Returns (sum, d/da sum, converged).
fn asymptotic_sum<R, DR>(ratio: R, dratio: DR, with_da: bool, settings: &KummerSettings) -> (Complex64, Complex64, bool)
where
    R: Fn(f64) -> Complex64,
    DR: Fn(f64) -> Complex64,
{
    let mut s = ONE;
    let mut ds = ZERO;
    let mut sum = ONE;
    let mut dsum = ZERO;
    let mut prev = f64::INFINITY;
    for k in 0..settings.max_terms {
        let kf = k as f64;
        let r = ratio(kf);
        let next_ds = if with_da { ds * r + s * dratio(kf) } else { ZERO };
        s *= r;
        ds = next_ds;
        let mag = s.norm() + if with_da { ds.norm() } else { 0.0 };
        if mag > prev && k > 1 {
            // terms started to grow: series is exhausted
            return (sum, dsum, false);
        }
        sum += s;
        dsum += ds;
        prev = mag;
        if mag <= settings.asymptotic_tol * sum.norm().max(dsum.norm()) {
            return (sum, dsum, true);
        }
    }
    (sum, dsum, false)
}

fn asymptotic(
    a: Complex64,
    b: u32,
    w: Complex64,
    with_da: bool,
    settings: &KummerSettings,
) -> Result<Option<KummerValue>> {
    if w.norm() < 1.0 {
        return Ok(None);
    }
    let val = asymptotic_value(a, b, w, with_da, settings)?;
    let Some((value, da)) = val else {
        return Ok(None);
    };
    // dM/dw = i (a/b) M(a+1, b+1, i w)
    let bf = b as f64;
    let dw = if a == ZERO {
        ZERO
    } else {
        match asymptotic_value(a + 1.0, b + 1, w, false, settings)? {
            Some((next, _)) => I * a / bf * next,
            None => return Ok(None),
        }
    };
    Ok(Some(KummerValue {
        value,
        dw,
        da,
        method: Method::Asymptotic,
    }))
}

/// Large-|z| expansion of 1F1(a; b; z), z = i w, valid for
/// -pi/2 < ph z < 3pi/2:
///
/// M ~ Gamma(b) [ e^{i pi a} z^{-a} / Gamma(b-a) S1 + e^z z^{a-b} / Gamma(a) S2 ]
///
/// S1 = sum (a)_s (a-b+1)_s / s! (-z)^{-s},  S2 = sum (b-a)_s (1-a)_s / s! z^{-s}
fn asymptotic_value(
    a: Complex64,
    b: u32,
    w: Complex64,
    with_da: bool,
    settings: &KummerSettings,
) -> Result<Option<(Complex64, Option<Complex64>)>> {
    let z = I * w;
    let bf = b as f64;
    let gamma_b: f64 = (1..b).map(|k| k as f64).product();
    let ln_z = z.ln();
    let zinv = z.inv();

    let (s1, ds1, ok1) = asymptotic_sum(
        |k| (a + k) * (a - bf + 1.0 + k) / (k + 1.0) * (-zinv),
        |k| (2.0 * a - bf + 1.0 + 2.0 * k) / (k + 1.0) * (-zinv),
        with_da,
        settings,
    );
    let (s2, ds2, ok2) = asymptotic_sum(
        |k| (bf - a + k) * (1.0 - a + k) / (k + 1.0) * zinv,
        |k| -(bf + 1.0 - 2.0 * a + 2.0 * k) / (k + 1.0) * zinv,
        with_da,
        settings,
    );
    if !(ok1 && ok2) {
        return Ok(None);
    }

    let e1 = (I * PI * a - a * ln_z).exp();
    let r1 = rgamma(Complex64::from(bf) - a);
    let e2 = (z + (a - bf) * ln_z).exp();
    let r2 = rgamma(a);
    let t1 = e1 * r1;
    let t2 = e2 * r2;
    let value = gamma_b * (t1 * s1 + t2 * s2);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Range(format!(
            "asymptotic prefactor overflow for M({a}, {b}, i*{w})"
        )));
    }

    let da = with_da.then(|| {
        // d/da [1/Gamma(b - a)] = psi(b - a) / Gamma(b - a)
        let dt1 = t1 * (I * PI - ln_z + digamma(Complex64::from(bf) - a));
        let dt2 = e2 * (ln_z * r2 + rgamma_derivative(a));
        gamma_b * (dt1 * s1 + t1 * ds1 + dt2 * s2 + t2 * ds2)
    });
    Ok(Some((value, da)))
}
