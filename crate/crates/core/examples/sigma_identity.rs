//! For a cross pair of a cluster configuration, evaluate the cross term
//! S_alpha by its direct and its reduced form, and the coefficient sigma
//! that should vanish when chi solves its own equation.

use coulomb_ansatz::ansatz::{AnsatzModel, AnsatzSettings};
use coulomb_ansatz::cluster::Realization;
use coulomb_ansatz::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use coulomb_ansatz::residual::{s_alpha, SIGMA_STEP};
use coulomb_ansatz::vec3::R3;

fn main() -> coulomb_ansatz::Result<()> {
    let sys = ParticleSystem::new(3, 1.0)?;
    let d = ClusterDecomposition::from_one_based(3, &[vec![1, 2]])?;
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let q = vec![R3::new(0.4, -0.3, 0.6), R3::new(0.2, 0.8, -0.1)];
    for realization in [Realization::TwoBody, Realization::Free] {
        let model = AnsatzModel::new(
            basis.clone(),
            vec![realization.build(2, 1.0)?],
            q.clone(),
            AnsatzSettings::default(),
        )?;
        let x = vec![R3::new(1.2, -0.7, 0.4), R3::new(300.0, 120.0, -500.0)];
        println!("{realization:?} cluster:");
        for alpha in basis.coefficients().cross() {
            let s = s_alpha(&model, &x, alpha, SIGMA_STEP)?;
            println!(
                "  pair ({}, {}): direct {:.6e}, reduced {:.6e}, difference {:.1e}",
                s.pair.0 + 1,
                s.pair.1 + 1,
                s.direct,
                s.reduced,
                s.route_difference()
            );
            for t in &s.sigma {
                println!(
                    "    sigma = {:.2e} (largest addend {:.2e})",
                    t.sigma.norm(),
                    t.largest_addend()
                );
            }
        }
    }
    Ok(())
}
