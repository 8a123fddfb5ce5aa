//! Evaluate the cluster ansatz for four particles with one bound-like pair
//! cluster, and print every factor it is built from.

use coulomb_ansatz::ansatz::{AnsatzModel, AnsatzSettings, ScatteringConfiguration};
use coulomb_ansatz::cluster::Realization;
use coulomb_ansatz::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use coulomb_ansatz::vec3::R3;

fn main() -> coulomb_ansatz::Result<()> {
    let sys = ParticleSystem::new(4, 1.0)?;
    let d = ClusterDecomposition::from_one_based(4, &[vec![1, 2]])?;
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let q = vec![R3::new(0.2, 0.4, 0.1), R3::new(0.9, 0.0, -0.3), R3::new(-0.2, 0.7, 0.5)];
    let x = vec![
        R3::new(1.0, 0.5, -0.4),
        R3::new(40.0, -25.0, 10.0),
        R3::new(-30.0, 35.0, 60.0),
    ];
    let config = ScatteringConfiguration::new(&basis, x.clone(), q.clone())?;
    println!("E = |Q|^2 = {:.4}", config.energy());

    let model = AnsatzModel::new(
        basis,
        vec![Realization::TwoBody.build(2, 1.0)?],
        q,
        AnsatzSettings::default(),
    )?;
    let v = model.evaluate(&x)?;
    println!("psi = {:.6e}", v.psi);
    println!("plane wave = {:.6}", v.plane_wave);
    for (j, chi) in v.chi.iter().enumerate() {
        println!("chi_{} = {:.6}", j + 1, chi);
    }
    for ((i, j), phi) in &v.cross {
        println!("Phi({}, {}) = {:.6}", i + 1, j + 1, phi);
    }
    println!(
        "largest alignment {:.4}, forward cone {}, node {}",
        v.flags.alignment, v.flags.forward_cone, v.flags.node
    );
    println!("{}\n{}", v.csv_header(), v.csv_row());
    Ok(())
}
