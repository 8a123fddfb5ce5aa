//! Remainders of the large-distance expansions of |x_alpha| and of the
//! Coulomb argument w_alpha around the separating coordinates, and their
//! decay rate along random rays.

use coulomb_ansatz::ansatz::{AnsatzModel, AnsatzSettings};
use coulomb_ansatz::cluster::Realization;
use coulomb_ansatz::fit::geometric_grid;
use coulomb_ansatz::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use coulomb_ansatz::residual::{intermediate_estimates_check, random_ray, RayScanSpec, REMAINDER_SLOPE_MAX};
use coulomb_ansatz::vec3::R3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coulomb_ansatz::Result<()> {
    let omega = 2.0;
    let sys = ParticleSystem::new(4, 1.0)?;
    let d = ClusterDecomposition::from_one_based(4, &[vec![1, 2], vec![3, 4]])?;
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let q = vec![R3::new(0.3, 0.1, 0.2), R3::new(-0.2, 0.4, 0.1), R3::new(0.7, -0.5, 0.3)];
    let chis = vec![Realization::TwoBody.build(2, 1.0)?, Realization::TwoBody.build(2, 1.0)?];
    let model = AnsatzModel::new(basis.clone(), chis, q.clone(), AnsatzSettings::default())?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for ray in 0..3 {
        let (y, dir) = random_ray(&model, omega, 0.05, &mut rng)?;
        let spec = RayScanSpec::new(y, dir, omega);
        let samples: Vec<Vec<R3>> = geometric_grid(spec.r_min, spec.r_max, 8)
            .into_iter()
            .map(|r| spec.point(r))
            .collect();
        let rep = intermediate_estimates_check(&basis, &samples, &q)?;
        println!(
            "ray {ray}: worst slope {:?}, passes (<= {REMAINDER_SLOPE_MAX}): {}",
            rep.worst_slope(),
            rep.passes(REMAINDER_SLOPE_MAX)
        );
        for p in &rep.pairs {
            let slope = |r: &coulomb_ansatz::residual::estimates::Remainder| r.fit.map_or(f64::NAN, |f| f.slope);
            println!(
                "  pair ({}, {}): r1 slope {:.3}, r2 slope {:.3}",
                p.pair.0 + 1,
                p.pair.1 + 1,
                slope(&p.first),
                slope(&p.second)
            );
        }
    }
    Ok(())
}
