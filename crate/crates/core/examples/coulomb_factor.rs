//! The two-body Coulomb distortion factor Phi(w) = e^{-pi eta/2}
//! Gamma(1 + i eta) M(-i eta, 1, i w) on a few arguments, with the method
//! the evaluator picks and the residual of its differential equation.

use coulomb_ansatz::special::kummer::kummer_m;
use coulomb_ansatz::special::{coulomb_distortion, kummer, sommerfeld, KummerSettings};
use coulomb_ansatz::vec3::R3;
use num_complex::Complex64;

fn main() -> coulomb_ansatz::Result<()> {
    let a0 = 1.0;
    let k = 0.8;
    let eta = sommerfeld(a0, k)?;
    println!("a0 = {a0}, |k| = {k}, eta = {:.4}", eta.eta());
    println!("{:>10} {:>24} {:>24} {:>10}", "w", "Phi", "Phi'", "ode res");
    for w in [0.0, 0.5, 3.0, 12.0, 60.0, 500.0, 1e4] {
        let f = kummer(eta, w)?;
        println!(
            "{w:>10} {:>24} {:>24} {:>10.1e}",
            fmt(f.value),
            fmt(f.d1),
            f.ode_residual(eta)
        );
    }

    let settings = KummerSettings::default();
    for w in [
        Complex64::new(2.0, 0.0),
        Complex64::new(15.0, 2.0),
        Complex64::new(40.0, -3.0),
    ] {
        let m = kummer_m(eta.kummer_a(), 1, w, false, &settings)?;
        println!("M(-i eta, 1, i({w})) = {} via {:?}", fmt(m.value), m.method);
    }

    // far from the pair, |Phi| -> 1 away from the forward direction
    let kv = R3::new(0.0, 0.0, k);
    for x in [R3::new(10.0, 0.0, 0.0), R3::new(1e3, 0.0, -1e3), R3::new(0.0, 1.0, 1e4)] {
        let f = coulomb_distortion(&x, &kv, a0)?;
        println!("x = {:?}: w = {:.3e}, |Phi| = {:.6}", x.as_slice(), f.w, f.value.norm());
    }
    Ok(())
}

fn fmt(z: Complex64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}
