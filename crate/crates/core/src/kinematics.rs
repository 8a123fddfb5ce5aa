//! Jacobi coordinates for n equal-mass particles split into clusters.
//!
//! Particle indices are 0-based throughout the library; the config layer
//! converts from the 1-based form users write.
//!
//! Every Jacobi row is scaled to norm sqrt(2), so B B^T = 2 I and the
//! kinetic energy of the relative motion is -Laplacian_X with E = |Q|^2.
//! Inside a cluster with inclusion order (k_1, ..., k_m) row t reads
//!
//!   y_t = sqrt(2t/(t+1)) ((r_{k_1} + ... + r_{k_t})/t - r_{k_{t+1}})
//!
//! and the inter-cluster rows join whole clusters as quasi-particles of
//! mass equal to their size:
//!
//!   z = sqrt(2 mu) (C_A - c_U),  mu = M_A m_U / (M_A + m_U).

use crate::error::{Error, Result};
use crate::vec3::R3;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;
use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleSystem {
    n: usize,
    a0: f64,
}

impl ParticleSystem {
    /// `a0 = 0` is accepted so that the free problem can serve as a
    /// calibration case.
    pub fn new(n: usize, a0: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Configuration(format!("need at least 2 particles, got {n}")));
        }
        if !(a0 >= 0.0) || !a0.is_finite() {
            return Err(Error::Configuration(format!("coupling a0 = {a0} must be >= 0")));
        }
        Ok(Self { n, a0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Number of Jacobi coordinates.
    pub fn dof(&self) -> usize {
        self.n - 1
    }
}

/// A partition of the particles into clusters (size >= 2) and singletons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDecomposition {
    n: usize,
    clusters: Vec<Vec<usize>>,
    singletons: Vec<usize>,
}

impl ClusterDecomposition {
    /// Particles not mentioned in `clusters` become singletons. Sets of
    /// size one are also read as singletons.
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut big = Vec::new();
        for set in clusters {
            for &p in &set {
                if p >= n {
                    return Err(Error::Configuration(format!(
                        "particle index {p} out of range for n = {n}"
                    )));
                }
                if !seen.insert(p) {
                    return Err(Error::Configuration(format!(
                        "particle {p} appears in more than one cluster"
                    )));
                }
            }
            if set.len() >= 2 {
                let mut set = set;
                set.sort_unstable();
                big.push(set);
            }
        }
        if big.iter().any(|c| c.len() == n) && n > 1 {
            // a single cluster holding everything has no separating coordinate
            return Err(Error::Configuration(
                "a cluster containing every particle leaves nothing to separate".into(),
            ));
        }
        let in_cluster: BTreeSet<usize> = big.iter().flatten().copied().collect();
        let singletons = (0..n).filter(|p| !in_cluster.contains(p)).collect();
        Ok(Self {
            n,
            clusters: big,
            singletons,
        })
    }

    /// Same as `new` with 1-based indices.
    pub fn from_one_based(n: usize, clusters: &[Vec<usize>]) -> Result<Self> {
        let zero_based = clusters
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&p| {
                        p.checked_sub(1)
                            .ok_or_else(|| Error::Configuration("particle indices are 1-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, zero_based)
    }

    pub fn all_singletons(n: usize) -> Self {
        Self {
            n,
            clusters: Vec::new(),
            singletons: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Clusters of size >= 2, members sorted.
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn singletons(&self) -> &[usize] {
        &self.singletons
    }

    /// Number of clusters l.
    pub fn l(&self) -> usize {
        self.clusters.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// N = sum (m_j - 1), the number of cluster coordinates.
    pub fn cluster_dof(&self) -> usize {
        self.clusters.iter().map(|c| c.len() - 1).sum()
    }

    /// M = sum m_j (m_j - 1) / 2, the number of within-cluster pairs.
    pub fn within_pairs(&self) -> usize {
        self.clusters.iter().map(|c| c.len() * (c.len() - 1) / 2).sum()
    }

    pub fn cluster_of(&self, particle: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(&particle))
    }

    /// Units joined by the inter-cluster coordinates: clusters first, then
    /// singletons in ascending order.
    pub fn default_units(&self) -> Vec<Unit> {
        (0..self.l())
            .map(Unit::Cluster)
            .chain(self.singletons.iter().map(|&p| Unit::Particle(p)))
            .collect()
    }

    fn unit_members(&self, unit: Unit) -> Vec<usize> {
        match unit {
            Unit::Cluster(j) => self.clusters[j].clone(),
            Unit::Particle(p) => vec![p],
        }
    }
}

/// A quasi-particle in the inter-cluster chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unit {
    Cluster(usize),
    Particle(usize),
}

/// Inclusion orders fixing one Jacobi basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiBasisSpec {
    /// One permutation of each cluster's members.
    pub cluster_orders: Vec<Vec<usize>>,
    /// A permutation of the units of the decomposition.
    pub unit_order: Vec<Unit>,
}

impl JacobiBasisSpec {
    pub fn default_for(decomposition: &ClusterDecomposition) -> Self {
        Self {
            cluster_orders: decomposition.clusters().to_vec(),
            unit_order: decomposition.default_units(),
        }
    }

    fn validate(&self, d: &ClusterDecomposition) -> Result<()> {
        if self.cluster_orders.len() != d.l() {
            return Err(Error::Configuration(format!(
                "basis spec lists {} cluster orders for {} clusters",
                self.cluster_orders.len(),
                d.l()
            )));
        }
        for (j, order) in self.cluster_orders.iter().enumerate() {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != d.clusters()[j] {
                return Err(Error::Configuration(format!(
                    "order {order:?} is not a permutation of cluster {:?}",
                    d.clusters()[j]
                )));
            }
        }
        let mut units = self.unit_order.clone();
        let mut expected = d.default_units();
        let key = |u: &Unit| match *u {
            Unit::Cluster(j) => (0, j),
            Unit::Particle(p) => (1, p),
        };
        units.sort_by_key(key);
        expected.sort_by_key(key);
        if units != expected {
            return Err(Error::Configuration(format!(
                "unit order {:?} is not a permutation of {:?}",
                self.unit_order, expected
            )));
        }
        Ok(())
    }
}

/// Rows of B and their split into cluster blocks and the inter-cluster block.
#[derive(Clone, Debug)]
pub struct JacobiBasis {
    system: ParticleSystem,
    decomposition: ClusterDecomposition,
    spec: JacobiBasisSpec,
    b: DMatrix<f64>,
    cluster_rows: Vec<Range<usize>>,
    z_rows: Range<usize>,
    coefficients: CoefficientMatrix,
}

pub fn build_jacobi_basis(
    system: &ParticleSystem,
    decomposition: &ClusterDecomposition,
    spec: &JacobiBasisSpec,
) -> Result<JacobiBasis> {
    let n = system.n();
    if decomposition.n() != n {
        return Err(Error::Configuration(format!(
            "decomposition covers {} particles, system has {n}",
            decomposition.n()
        )));
    }
    spec.validate(decomposition)?;

    let mut b = DMatrix::zeros(n - 1, n);
    let mut row = 0;
    let mut cluster_rows = Vec::with_capacity(decomposition.l());
    for order in &spec.cluster_orders {
        let start = row;
        for t in 1..order.len() {
            let tf = t as f64;
            let s = (2.0 * tf / (tf + 1.0)).sqrt();
            for &p in &order[..t] {
                b[(row, p)] = s / tf;
            }
            b[(row, order[t])] = -s;
            row += 1;
        }
        cluster_rows.push(start..row);
    }

    let z_start = row;
    let units: Vec<Vec<usize>> = spec.unit_order.iter().map(|&u| decomposition.unit_members(u)).collect();
    let mut acc: Vec<usize> = units[0].clone();
    for unit in &units[1..] {
        let ma = acc.len() as f64;
        let mu_size = unit.len() as f64;
        let s = (2.0 * ma * mu_size / (ma + mu_size)).sqrt();
        for &p in &acc {
            b[(row, p)] = s / ma;
        }
        for &p in unit {
            b[(row, p)] = -s / mu_size;
        }
        acc.extend_from_slice(unit);
        row += 1;
    }
    debug_assert_eq!(row, n - 1);

    let coefficients = CoefficientMatrix::from_b(&b, decomposition);
    Ok(JacobiBasis {
        system: *system,
        decomposition: decomposition.clone(),
        spec: spec.clone(),
        b,
        cluster_rows,
        z_rows: z_start..n - 1,
        coefficients,
    })
}

impl JacobiBasis {
    pub fn system(&self) -> &ParticleSystem {
        &self.system
    }

    pub fn decomposition(&self) -> &ClusterDecomposition {
        &self.decomposition
    }

    pub fn spec(&self) -> &JacobiBasisSpec {
        &self.spec
    }

    /// The (n-1) x n matrix mapping particle positions to coordinates.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn dof(&self) -> usize {
        self.b.nrows()
    }

    /// Coordinate indices belonging to cluster j.
    pub fn cluster_rows(&self, j: usize) -> Range<usize> {
        self.cluster_rows[j].clone()
    }

    /// Coordinate indices of the inter-cluster block.
    pub fn z_rows(&self) -> Range<usize> {
        self.z_rows.clone()
    }

    pub fn coefficients(&self) -> &CoefficientMatrix {
        &self.coefficients
    }

    /// X = B r, one 3-vector per coordinate.
    pub fn coordinates(&self, positions: &[R3]) -> Vec<R3> {
        assert_eq!(positions.len(), self.system.n());
        (0..self.dof())
            .map(|k| {
                positions
                    .iter()
                    .enumerate()
                    .fold(R3::zeros(), |acc, (p, r)| acc + r * self.b[(k, p)])
            })
            .collect()
    }

    /// Particle positions with centre of mass at the origin.
    pub fn positions(&self, coords: &[R3]) -> Vec<R3> {
        assert_eq!(coords.len(), self.dof());
        // B^T B / 2 is the projector off the centre of mass
        (0..self.system.n())
            .map(|p| {
                coords
                    .iter()
                    .enumerate()
                    .fold(R3::zeros(), |acc, (k, y)| acc + y * (0.5 * self.b[(k, p)]))
            })
            .collect()
    }

    pub fn pair_coefficients(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        let alpha = self.coefficients.index_of(i, j)?;
        Ok(self.coefficients.row(alpha).to_vec())
    }

    /// Momentum rows coincide with coordinate rows: k_alpha = sum zeta p.
    pub fn momentum_coefficients(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        self.pair_coefficients(i, j)
    }

    /// x_alpha = r_i - r_j for pair index alpha.
    pub fn pair_vector(&self, alpha: usize, coords: &[R3]) -> R3 {
        self.coefficients.combine(alpha, coords)
    }

    /// All pair vectors in the coefficient matrix's pair order.
    pub fn pair_vectors(&self, coords: &[R3]) -> Vec<R3> {
        (0..self.coefficients.len())
            .map(|a| self.pair_vector(a, coords))
            .collect()
    }

    /// sum_alpha a0 / |x_alpha|
    pub fn potential(&self, coords: &[R3]) -> f64 {
        let a0 = self.system.a0();
        self.pair_vectors(coords).iter().map(|x| a0 / x.norm()).sum()
    }

    /// B B^T, equal to 2 I by construction.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.b * self.b.transpose()
    }

    /// Orthogonal R with X_other = R X_self.
    pub fn basis_change(&self, other: &JacobiBasis) -> Result<DMatrix<f64>> {
        if other.system.n() != self.system.n() {
            return Err(Error::Misuse("basis change between different particle counts".into()));
        }
        Ok(&other.b * self.b.transpose() * 0.5)
    }
}

/// A random decomposition of n particles into clusters of at most three,
/// with shuffled inclusion orders.
pub fn random_decomposition<R: Rng>(n: usize, rng: &mut R) -> Result<(ClusterDecomposition, JacobiBasisSpec)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut clusters = Vec::new();
    let mut rest = &perm[..];
    while !rest.is_empty() {
        let take = rng.gen_range(1..=rest.len().min(3));
        clusters.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    if clusters.len() == 1 {
        let last = clusters[0].pop().expect("n >= 2");
        clusters.push(vec![last]);
    }
    let d = ClusterDecomposition::new(n, clusters)?;
    let mut spec = JacobiBasisSpec::default_for(&d);
    for o in &mut spec.cluster_orders {
        o.shuffle(rng);
    }
    spec.unit_order.shuffle(rng);
    Ok((d, spec))
}

/// Worst deviations from the basis identities over random configurations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityReport {
    pub configurations: usize,
    /// max |(r_i - r_j) - sum zeta x| / max |r|
    pub reconstruction: f64,
    /// max |sum zeta^2 - 1|
    pub zeta_norm: f64,
    /// max |B B^T - 2 I|
    pub gram: f64,
    /// max |R^T R - I| for the change to the other basis
    pub orthogonality: f64,
    /// max |R X_self - X_other| / max |r|
    pub transport: f64,
}

pub fn identity_check<R: Rng>(
    basis: &JacobiBasis,
    other: &JacobiBasis,
    configurations: usize,
    scale: f64,
    rng: &mut R,
) -> Result<IdentityReport> {
    let n = basis.system().n();
    let dof = basis.dof();
    let cm = basis.coefficients();
    let mut report = IdentityReport {
        configurations,
        reconstruction: 0.0,
        zeta_norm: 0.0,
        gram: 0.0,
        orthogonality: 0.0,
        transport: 0.0,
    };
    for alpha in 0..cm.len() {
        let s: f64 = cm.row(alpha).iter().map(|z| z * z).sum();
        report.zeta_norm = report.zeta_norm.max((s - 1.0).abs());
    }
    let g = basis.gram();
    let r = basis.basis_change(other)?;
    let rtr = r.transpose() * &r;
    for i in 0..dof {
        for j in 0..dof {
            let e = if i == j { 1.0 } else { 0.0 };
            report.gram = report.gram.max((g[(i, j)] - 2.0 * e).abs());
            report.orthogonality = report.orthogonality.max((rtr[(i, j)] - e).abs());
        }
    }
    for _ in 0..configurations {
        let pos: Vec<R3> = (0..n)
            .map(|_| R3::from_fn(|_, _| rng.gen_range(-scale..scale)))
            .collect();
        let size = pos.iter().map(|p| p.norm()).fold(f64::MIN_POSITIVE, f64::max);
        let x = basis.coordinates(&pos);
        for alpha in 0..cm.len() {
            let (i, j) = cm.pair(alpha);
            let err = (pos[i] - pos[j] - basis.pair_vector(alpha, &x)).norm() / size;
            report.reconstruction = report.reconstruction.max(err);
        }
        let xo = other.coordinates(&pos);
        for k in 0..dof {
            let mapped = (0..dof).fold(R3::zeros(), |acc, m| acc + x[m] * r[(k, m)]);
            report.transport = report.transport.max((mapped - xo[k]).norm() / size);
        }
    }
    Ok(report)
}

/// Euclidean norm of all pair coordinates.
pub fn hyperradius(pairs: &[R3]) -> f64 {
    pairs.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

/// zeta rows for every pair, within-cluster pairs first.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMatrix {
    zeta: DMatrix<f64>,
    pairs: Vec<(usize, usize)>,
    within: usize,
}

impl CoefficientMatrix {
    fn from_b(b: &DMatrix<f64>, decomposition: &ClusterDecomposition) -> Self {
        let (m1, m0) = classify_pairs(decomposition);
        let within = m1.len();
        let pairs: Vec<(usize, usize)> = m1.into_iter().chain(m0).collect();
        let mut zeta = DMatrix::zeros(pairs.len(), b.nrows());
        for (alpha, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..b.nrows() {
                zeta[(alpha, k)] = 0.5 * (b[(k, i)] - b[(k, j)]);
            }
        }
        Self { zeta, pairs, within }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.zeta
    }

    /// (i, j) with i < j for every pair index.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, alpha: usize) -> (usize, usize) {
        self.pairs[alpha]
    }

    pub fn index_of(&self, i: usize, j: usize) -> Result<usize> {
        if i == j {
            return Err(Error::Misuse(format!("pair ({i}, {i}) is not a pair")));
        }
        let key = (i.min(j), i.max(j));
        let alpha = self
            .pairs
            .iter()
            .position(|&p| p == key)
            .ok_or_else(|| Error::Misuse(format!("pair ({i}, {j}) out of range")))?;
        Ok(alpha)
    }

    pub fn row(&self, alpha: usize) -> Vec<f64> {
        self.zeta.row(alpha).iter().copied().collect()
    }

    pub fn get(&self, alpha: usize, k: usize) -> f64 {
        self.zeta[(alpha, k)]
    }

    /// Pair indices inside clusters (M1).
    pub fn within(&self) -> Range<usize> {
        0..self.within
    }

    /// Pair indices across clusters (M0).
    pub fn cross(&self) -> Range<usize> {
        self.within..self.pairs.len()
    }

    pub fn is_within(&self, alpha: usize) -> bool {
        alpha < self.within
    }

    /// sum_k zeta_{alpha k} v_k
    pub fn combine(&self, alpha: usize, vs: &[R3]) -> R3 {
        vs.iter()
            .enumerate()
            .fold(R3::zeros(), |acc, (k, v)| acc + v * self.zeta[(alpha, k)])
    }
}

/// Within-cluster pairs (M1) and cross pairs (M0), each lexicographic.
pub fn classify_pairs(d: &ClusterDecomposition) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut m1 = Vec::new();
    let mut m0 = Vec::new();
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            match (d.cluster_of(i), d.cluster_of(j)) {
                (Some(a), Some(b)) if a == b => m1.push((i, j)),
                _ => m0.push((i, j)),
            }
        }
    }
    (m1, m0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis(n: usize, clusters: Vec<Vec<usize>>) -> JacobiBasis {
        let sys = ParticleSystem::new(n, 1.0).unwrap();
        let d = ClusterDecomposition::new(n, clusters).unwrap();
        build_jacobi_basis(&sys, &d, &JacobiBasisSpec::default_for(&d)).unwrap()
    }

    #[test]
    fn two_body_row() {
        let b = basis(2, vec![]);
        assert_eq!(b.matrix().as_slice(), &[1.0, -1.0]);
        assert_eq!(b.pair_coefficients(0, 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn three_body_rows_and_zeta() {
        let b = basis(3, vec![]);
        let m = b.matrix();
        let s = (4.0f64 / 3.0).sqrt();
        let expect = [[1.0, -1.0, 0.0], [s / 2.0, s / 2.0, -s]];
        for r in 0..2 {
            for c in 0..3 {
                assert!((m[(r, c)] - expect[r][c]).abs() < 1e-15);
            }
        }
        let z = b.pair_coefficients(1, 2).unwrap();
        assert!((z[0] + 0.5).abs() < 1e-15);
        assert!((z[1] - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zeta_solves_random_configurations() {
        // independent oracle: least squares for zeta from random positions
        let b = basis(3, vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for _ in 0..10 {
            let pos: Vec<R3> = (0..3).map(|_| R3::from_fn(|_, _| rng.gen_range(-5.0..5.0))).collect();
            let x = b.coordinates(&pos);
            let target = pos[1] - pos[2];
            for c in 0..3 {
                rows.push([x[0][c], x[1][c]]);
                rhs.push(target[c]);
            }
        }
        let a = DMatrix::from_fn(rows.len(), 2, |r, c| rows[r][c]);
        let y = nalgebra::DVector::from_vec(rhs);
        let sol = a.clone().svd(true, true).solve(&y, 1e-14).unwrap();
        assert!((&a * &sol - &y).norm() < 1e-12);
        let z = b.pair_coefficients(1, 2).unwrap();
        assert!((sol[0] - z[0]).abs() < 1e-12 && (sol[1] - z[1]).abs() < 1e-12);
    }

    #[test]
    fn four_body_triple_plus_one() {
        let b = basis(4, vec![vec![0, 1, 2]]);
        assert_eq!(b.cluster_rows(0), 0..2);
        assert_eq!(b.z_rows(), 2..3);
        let g = b.gram();
        for r in 0..3 {
            for c in 0..3 {
                let e = if r == c { 2.0 } else { 0.0 };
                assert!((g[(r, c)] - e).abs() < 1e-12);
            }
        }
        // quasi-particle row: mu = 3/4, sqrt(3/2) (centre of triple - r4)
        let s = 1.5f64.sqrt();
        assert!((b.matrix()[(2, 3)] + s).abs() < 1e-15);
        assert!((b.matrix()[(2, 0)] - s / 3.0).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let d = ClusterDecomposition::new(3, vec![vec![0, 1]]).unwrap();
        let (m1, m0) = classify_pairs(&d);
        assert_eq!(m1, vec![(0, 1)]);
        assert_eq!(m0, vec![(0, 2), (1, 2)]);
        let d = ClusterDecomposition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let (m1, m0) = classify_pairs(&d);
        assert_eq!((m1.len(), m0.len()), (2, 4));
        let d = ClusterDecomposition::new(5, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(d.within_pairs(), 3);
        assert_eq!(classify_pairs(&d).1.len(), 7);
        assert_eq!(d.cluster_dof(), 2);
    }

    #[test]
    fn within_pairs_have_no_z_component() {
        let b = basis(6, vec![vec![0, 3], vec![1, 2, 5]]);
        let cm = b.coefficients();
        for alpha in cm.within() {
            for k in b.z_rows() {
                assert_eq!(cm.get(alpha, k), 0.0);
            }
        }
        for alpha in cm.cross() {
            let z: f64 = b.z_rows().map(|k| cm.get(alpha, k).abs()).sum();
            assert!(z > 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ParticleSystem::new(1, 1.0).is_err());
        assert!(ParticleSystem::new(3, -1.0).is_err());
        assert!(ClusterDecomposition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(ClusterDecomposition::new(3, vec![vec![0, 3]]).is_err());
        assert!(ClusterDecomposition::new(3, vec![vec![0, 1, 2]]).is_err());
        assert!(ClusterDecomposition::from_one_based(3, &[vec![0, 1]]).is_err());
        let sys = ParticleSystem::new(3, 1.0).unwrap();
        let d = ClusterDecomposition::new(3, vec![vec![0, 1]]).unwrap();
        let bad = JacobiBasisSpec {
            cluster_orders: vec![vec![0, 2]],
            unit_order: d.default_units(),
        };
        assert!(matches!(
            build_jacobi_basis(&sys, &d, &bad),
            Err(Error::Configuration(_))
        ));
        let bad = JacobiBasisSpec {
            cluster_orders: vec![vec![1, 0]],
            unit_order: vec![Unit::Cluster(0)],
        };
        assert!(build_jacobi_basis(&sys, &d, &bad).is_err());
        let b = basis(3, vec![]);
        assert!(b.pair_coefficients(1, 1).is_err());
    }

    fn random_setup(n: usize, seed: u64) -> (ParticleSystem, ClusterDecomposition, JacobiBasisSpec) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, spec) = random_decomposition(n, &mut rng).unwrap();
        (ParticleSystem::new(n, 1.0).unwrap(), d, spec)
    }

    #[test]
    fn identity_report_is_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=8 {
            let (sys, d, spec) = random_setup(n, n as u64);
            let a = build_jacobi_basis(&sys, &d, &spec).unwrap();
            let s = ClusterDecomposition::all_singletons(n);
            let b = build_jacobi_basis(&sys, &s, &JacobiBasisSpec::default_for(&s)).unwrap();
            let r = identity_check(&a, &b, 50, 10.0, &mut rng).unwrap();
            assert!(
                r.reconstruction < 1e-12 && r.zeta_norm < 1e-12 && r.orthogonality < 1e-12,
                "{r:?}"
            );
            assert!(r.gram < 1e-12 && r.transport < 1e-12, "{r:?}");
        }
    }

    proptest! {
        #[test]
        fn reconstruction_and_normalisation(n in 2usize..9, seed in any::<u64>(), scale in 0.1f64..100.0) {
            let (sys, d, spec) = random_setup(n, seed);
            let b = build_jacobi_basis(&sys, &d, &spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
            let pos: Vec<R3> = (0..n).map(|_| R3::from_fn(|_, _| rng.gen_range(-scale..scale))).collect();
            let x = b.coordinates(&pos);
            let cm = b.coefficients();
            for alpha in 0..cm.len() {
                let (i, j) = cm.pair(alpha);
                let err = (pos[i] - pos[j] - b.pair_vector(alpha, &x)).norm();
                prop_assert!(err < 1e-12 * scale);
                let s: f64 = cm.row(alpha).iter().map(|z| z * z).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
            }
            let g = b.gram();
            for r in 0..n - 1 {
                for c in 0..n - 1 {
                    let e = if r == c { 2.0 } else { 0.0 };
                    prop_assert!((g[(r, c)] - e).abs() < 1e-13);
                }
                let row_sum: f64 = b.matrix().row(r).iter().sum();
                prop_assert!(row_sum.abs() < 1e-13);
            }
        }

        #[test]
        fn basis_change_is_orthogonal(n in 2usize..9, s1 in any::<u64>(), s2 in any::<u64>()) {
            let (sys, d1, spec1) = random_setup(n, s1);
            let (_, d2, spec2) = random_setup(n, s2);
            let a = build_jacobi_basis(&sys, &d1, &spec1).unwrap();
            let b = build_jacobi_basis(&sys, &d2, &spec2).unwrap();
            let r = a.basis_change(&b).unwrap();
            let rtr = r.transpose() * &r;
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((rtr[(i, j)] - e).abs() < 1e-12);
                }
            }
            // R maps coordinates of a onto coordinates of b
            let pos: Vec<R3> = (0..n).map(|p| R3::new(p as f64, (p * p) as f64 * 0.3, -1.0 / (p + 1) as f64)).collect();
            let xa = a.coordinates(&pos);
            let xb = b.coordinates(&pos);
            for k in 0..n - 1 {
                let mapped = (0..n - 1).fold(R3::zeros(), |acc, m| acc + xa[m] * r[(k, m)]);
                prop_assert!((mapped - xb[k]).norm() < 1e-12 * 10.0);
            }
        }

        #[test]
        fn positions_round_trip(n in 2usize..9, seed in any::<u64>()) {
            let (sys, d, spec) = random_setup(n, seed);
            let b = build_jacobi_basis(&sys, &d, &spec).unwrap();
            let coords: Vec<R3> = (0..n - 1).map(|k| R3::new(k as f64, 1.0, -0.5 * k as f64)).collect();
            let back = b.coordinates(&b.positions(&coords));
            for k in 0..n - 1 {
                prop_assert!((back[k] - coords[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_rows_match_pair_rows() {
        let b = basis(3, vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p: Vec<R3> = (0..2).map(|_| R3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect();
        let x: Vec<R3> = (0..2).map(|_| R3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect();
        let cm = b.coefficients();
        for alpha in 0..3 {
            let (i, j) = cm.pair(alpha);
            assert_eq!(
                b.momentum_coefficients(i, j).unwrap(),
                b.pair_coefficients(i, j).unwrap()
            );
        }
        // sum over pairs of <k_a, x_a> = (n/2) <P, X> for equal masses with B B^T = 2 I
        let lhs: f64 = (0..3).map(|a| cm.combine(a, &p).dot(&cm.combine(a, &x))).sum();
        let rhs: f64 = 1.5 * (p[0].dot(&x[0]) + p[1].dot(&x[1]));
        assert!((lhs - rhs).abs() < 1e-13);
    }
}
