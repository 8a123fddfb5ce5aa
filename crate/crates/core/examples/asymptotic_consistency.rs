//! When every particle moves apart, the cluster ansatz should approach the
//! fully separated product of pair factors. Prints |ratio - 1| along a ray.

use coulomb_ansatz::ansatz::{asymptotic_consistency, AnsatzModel, AnsatzSettings};
use coulomb_ansatz::cluster::Realization;
use coulomb_ansatz::fit::geometric_grid;
use coulomb_ansatz::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use coulomb_ansatz::vec3::R3;

fn main() -> coulomb_ansatz::Result<()> {
    let sys = ParticleSystem::new(4, 1.0)?;
    let d = ClusterDecomposition::from_one_based(4, &[vec![1, 2, 3]])?;
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let q = vec![
        R3::new(0.4, 0.2, -0.3),
        R3::new(-0.1, 0.6, 0.2),
        R3::new(0.5, -0.4, 0.6),
    ];
    let model = AnsatzModel::new(
        basis,
        vec![Realization::BbkProduct.build(3, 1.0)?],
        q,
        AnsatzSettings::default(),
    )?;
    let s = 3f64.sqrt();
    let dir = vec![
        R3::new(1.0, 0.0, 0.0) / s,
        R3::new(0.0, -1.0, 0.0) / s,
        R3::new(0.0, 0.0, -1.0) / s,
    ];
    let rep = asymptotic_consistency(&model, &dir, &geometric_grid(1e2, 1e5, 7))?;
    for p in &rep.points {
        println!(
            "R = {:>8.0}  ratio = {:.6}  |ratio - 1| = {:.2e}",
            p.r, p.ratio, p.deviation
        );
    }
    println!("log-log trend {:.2}", rep.trend.slope);
    Ok(())
}
