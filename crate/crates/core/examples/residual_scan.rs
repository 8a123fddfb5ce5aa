//! Scan |S / Psi| along a ray that sends all particles apart and fit its
//! decay exponent. Writes the scan as CSV to stdout when given `--csv`.

use coulomb_ansatz::ansatz::{AnsatzModel, AnsatzSettings};
use coulomb_ansatz::kinematics::{build_jacobi_basis, ClusterDecomposition, JacobiBasisSpec, ParticleSystem};
use coulomb_ansatz::residual::{random_ray, ray_scan, RayScanSpec};
use coulomb_ansatz::vec3::R3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coulomb_ansatz::Result<()> {
    let csv = std::env::args().any(|a| a == "--csv");
    let sys = ParticleSystem::new(3, 1.0)?;
    let d = ClusterDecomposition::all_singletons(3);
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    let q = vec![R3::new(0.5, 0.2, -0.4), R3::new(-0.3, 0.6, 0.5)];
    let model = AnsatzModel::new(basis, Vec::new(), q, AnsatzSettings::default())?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (y, dir) = random_ray(&model, 0.0, model.settings().delta_cone, &mut rng)?;
    let spec = RayScanSpec::new(y, dir, 0.0);
    let rep = ray_scan(&model, &spec)?;
    if csv {
        print!("{}", rep.csv());
        return Ok(());
    }
    println!(
        "{} of {} points used over R in [{:.0}, {:.0}]",
        rep.used,
        rep.points.len(),
        rep.r_range.0,
        rep.r_range.1
    );
    for p in &rep.points {
        match p.ratio() {
            Some(r) => println!("  R = {:>9.1}  |S/Psi| = {r:.3e}  V = {:.3e}", p.r, p.potential),
            None => println!(
                "  R = {:>9.1}  excluded ({})",
                p.r,
                p.excluded.map_or("", |e| e.label())
            ),
        }
    }
    println!(
        "slope {:.3} +- {:.3}; potential slope {:.3}",
        rep.slope, rep.slope_se, rep.potential_slope
    );
    Ok(())
}
