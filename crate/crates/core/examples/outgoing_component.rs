//! Cluster configurations with the full cross factor against the factor
//! with its outgoing e^{i w} part removed. Along rays that keep a cluster
//! at fixed size, the full factor leaves a residual that decays only like
//! 1/R; dropping the outgoing wave restores the faster decay.

use coulomb_ansatz::ansatz::{AnsatzModel, AnsatzSettings, CrossFactor};
use coulomb_ansatz::cluster::Realization;
use coulomb_ansatz::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use coulomb_ansatz::residual::{random_ray, ray_scan, RayScanSpec};
use coulomb_ansatz::vec3::R3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coulomb_ansatz::Result<()> {
    let omega = 2.0;
    let sys = ParticleSystem::new(3, 1.0)?;
    let d = ClusterDecomposition::from_one_based(3, &[vec![1, 2]])?;
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let q = vec![R3::new(0.3, -0.2, 0.5), R3::new(0.6, 0.4, -0.2)];
    let full = AnsatzModel::new(
        basis,
        vec![Realization::TwoBody.build(2, 1.0)?],
        q,
        AnsatzSettings::default(),
    )?;
    let regular = full.with_settings(AnsatzSettings {
        cross_factor: CrossFactor::Regular,
        ..*full.settings()
    });

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    println!("{:>4} {:>10} {:>10}", "ray", "full", "regular");
    for ray in 0..5 {
        let (y, dir) = random_ray(&full, omega, full.settings().delta_cone, &mut rng)?;
        let spec = RayScanSpec::new(y, dir, omega);
        let a = ray_scan(&full, &spec)?;
        let b = ray_scan(&regular, &spec)?;
        println!("{ray:>4} {:>10.3} {:>10.3}", a.slope, b.slope);
    }
    Ok(())
}
