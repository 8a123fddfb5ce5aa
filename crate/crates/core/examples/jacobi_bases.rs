//! Build Jacobi bases for a cluster decomposition, map particle positions to
//! Jacobi coordinates and back, and check the basis identities.

use coulomb_ansatz::kinematics::{
    build_jacobi_basis, identity_check, ClusterDecomposition, JacobiBasisSpec, ParticleSystem, Unit,
};
use coulomb_ansatz::vec3::R3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coulomb_ansatz::Result<()> {
    let sys = ParticleSystem::new(5, 1.0)?;
    // clusters {1,2,3} and {4,5} in 1-based labels
    let d = ClusterDecomposition::from_one_based(5, &[vec![1, 2, 3], vec![4, 5]])?;
    let basis = build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d))?;
    println!(
        "dof {}, cluster rows {:?} and {:?}, separating rows {:?}",
        basis.dof(),
        basis.cluster_rows(0),
        basis.cluster_rows(1),
        basis.z_rows()
    );

    let cm = basis.coefficients();
    println!("pair coefficients (within-cluster pairs first):");
    for alpha in 0..cm.len() {
        let (i, j) = cm.pair(alpha);
        let row: Vec<String> = cm.row(alpha).iter().map(|c| format!("{c:+.4}")).collect();
        println!(
            "  ({}, {}) {} [{}]",
            i + 1,
            j + 1,
            if cm.is_within(alpha) { "within" } else { "cross " },
            row.join(" ")
        );
    }

    let r: Vec<R3> = (0..5)
        .map(|i| R3::new(i as f64, (i * i) as f64 * 0.3, -0.5 * i as f64))
        .collect();
    let x = basis.coordinates(&r);
    let back = basis.positions(&x);
    let drift = r
        .iter()
        .zip(&back)
        .map(|(a, b)| ((a - b) - (r[0] - back[0])).norm())
        .fold(0.0, f64::max);
    println!(
        "relative positions recovered to {drift:.1e}; V = {:.6}",
        basis.potential(&x)
    );

    // a second basis with a different inclusion order
    let other_spec = JacobiBasisSpec {
        cluster_orders: vec![vec![2, 0, 1], vec![4, 3]],
        unit_order: vec![Unit::Cluster(1), Unit::Cluster(0)],
    };
    let other = build_jacobi_basis(&sys, &d, &other_spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rep = identity_check(&basis, &other, 1000, 10.0, &mut rng)?;
    println!("{rep:#?}");
    Ok(())
}
