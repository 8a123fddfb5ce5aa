//! Complex Gamma and digamma functions.
//!
//! `ln_gamma` uses the Lanczos approximation with g = 7 and nine
//! coefficients on the half plane Re z >= 1/2 and the reflection formula
//! elsewhere. The relative accuracy of `gamma` is about 1e-15 on the strips
//! used by the Kummer asymptotics (Re z in [-2, 3], |Im z| <= 50).

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(2 pi) / 2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Principal-ish logarithm of Gamma. The imaginary part is only defined
/// modulo 2 pi; callers exponentiate.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return Complex64::from(PI.ln()) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::from(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    ln_gamma(z).exp()
}

/// 1 / Gamma(z), entire; exactly zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma(z)).exp()
}

/// Derivative of 1 / Gamma(z), computed as (1 - z psi(z + 1)) / Gamma(z + 1)
/// so that it stays regular near z = 0.
pub fn rgamma_derivative(z: Complex64) -> Complex64 {
    let zp1 = z + 1.0;
    if is_nonpositive_integer(zp1) {
        // z = -1, -2, ...: d/dz 1/Gamma = (-1)^n n! at z = -n
        let n = (-z.re).round() as i64;
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Complex64::from(sign * fact);
    }
    rgamma(zp1) * (Complex64::new(1.0, 0.0) - z * digamma(zp1))
}

/// Digamma psi(z) = Gamma'(z) / Gamma(z).
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // psi(z) = psi(1 - z) - pi cot(pi z)
        let w = PI * z;
        return digamma(Complex64::new(1.0, 0.0) - z) - PI * w.cos() / w.sin();
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < 10.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let zi2 = (z * z).inv();
    // Bernoulli tail: B_2k / (2k z^2k)
    const TAIL: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32_760.0,
        1.0 / 12.0,
    ];
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = zi2;
    for c in TAIL {
        series += c * pow;
        pow *= zi2;
    }
    acc + z.ln() - 0.5 * z.inv() - series
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln(sin(pi z)), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im > 20.0 {
        // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i)
        let e = (2.0 * i * PI * z).exp();
        -i * PI * z + (i * 0.5).ln() + (Complex64::new(1.0, 0.0) - e).ln()
    } else if z.im < -20.0 {
        // sin(pi z) = e^{i pi z} (1 - e^{-2 i pi z}) / (2i)
        let e = (-2.0 * i * PI * z).exp();
        i * PI * z - (2.0 * i).ln() + (Complex64::new(1.0, 0.0) - e).ln()
    } else {
        (PI * z).sin().ln()
    }
}
