//! The cluster realizations: their values, u-vectors, and how well each
//! solves its own internal Schrodinger equation.

use coulomb_ansatz::cluster::{cluster_hyperradius, u_vectors, Realization, DEFAULT_EPS_NODE};
use coulomb_ansatz::vec3::R3;

fn main() -> coulomb_ansatz::Result<()> {
    let a0 = 1.0;
    for (name, realization, m) in [
        ("free, 3 particles", Realization::Free, 3),
        ("two-body Coulomb", Realization::TwoBody, 2),
        ("product, 3 particles", Realization::BbkProduct, 3),
    ] {
        let chi = realization.build(m, a0)?;
        let y: Vec<R3> = (0..m - 1)
            .map(|i| R3::new(3.0 + i as f64, -1.0, 2.0 * i as f64 + 0.5))
            .collect();
        let p: Vec<R3> = (0..m - 1).map(|i| R3::new(0.3, 0.5 - 0.2 * i as f64, 0.7)).collect();
        let value = chi.value(&y, &p)?;
        let u = u_vectors(chi.as_ref(), &y, &p, DEFAULT_EPS_NODE)?;
        println!(
            "{name}: rho = {:.3}, chi = {:.6}, internal V = {:.4}",
            cluster_hyperradius(m, &y),
            value,
            chi.potential(&y)
        );
        for (nu, u) in u.u.iter().enumerate() {
            println!("  u_{} = ({:.4}, {:.4}, {:.4})", nu + 1, u[0], u[1], u[2]);
        }
        println!("  |(H - E) chi| / |chi| = {:.2e}", chi.residual_selftest(&y, &p)?);
    }
    Ok(())
}
