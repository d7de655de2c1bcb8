//! Random mixed-integer feasibility instances over hybrid zonotopes.

use hzplan::kernel::RngStream;
use hzplan::SparseMatrix;
use hzplan::sets::Form;
use hzplan::HybridZonotope;

/// Sizes and sparsity of a random instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MilpConfig {
    pub n: usize,
    pub n_gc: usize,
    pub n_gb: usize,
    pub n_c: usize,
    pub density: f64,
}

impl MilpConfig {
    /// Desk-scale sizes used by the regression suite.
    pub const DESK: MilpConfig = MilpConfig { n: 20, n_gc: 40, n_gb: 10, n_c: 10, density: 0.3 };
    /// Sizes of the original benchmark.
    pub const FULL: MilpConfig = MilpConfig { n: 100, n_gc: 200, n_gb: 50, n_c: 50, density: 0.1 };
}

/// A generated instance: minimize `qᵀz` over `z`.
#[derive(Clone, Debug)]
pub struct MilpInstance {
    pub z: HybridZonotope,
    pub p: SparseMatrix,
    pub q: Vec<f64>,
    /// Factor vector used to make the instance feasible.
    pub xi_star: Vec<f64>,
}

fn sparse_uniform(rows: usize, cols: usize, density: f64, rng: &mut RngStream) -> SparseMatrix {
    let mut trip = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.unit() < density {
                trip.push((i, j, rng.uniform(-1.0, 1.0).expect("valid interval")));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, trip).expect("indices in range")
}

/// Canonical-form instance with `G`, `A` entries present with probability
/// `density` and uniform on `[−1, 1]`. Feasibility is forced by drawing
/// `ξ*` from the mixed-integer box and setting `b = Aξ*`.
pub fn generate(cfg: &MilpConfig, rng: &mut RngStream) -> MilpInstance {
    let u = |rng: &mut RngStream| rng.uniform(-1.0, 1.0).expect("valid interval");
    let gc = sparse_uniform(cfg.n, cfg.n_gc, cfg.density, rng);
    let gb = sparse_uniform(cfg.n, cfg.n_gb, cfg.density, rng);
    let ac = sparse_uniform(cfg.n_c, cfg.n_gc, cfg.density, rng);
    let ab = sparse_uniform(cfg.n_c, cfg.n_gb, cfg.density, rng);
    let c: Vec<f64> = (0..cfg.n).map(|_| u(rng)).collect();
    let q: Vec<f64> = (0..cfg.n).map(|_| u(rng)).collect();
    let mut xi_star: Vec<f64> = (0..cfg.n_gc).map(|_| u(rng)).collect();
    xi_star.extend((0..cfg.n_gb).map(|_| if rng.bernoulli(0.5) { 1.0 } else { -1.0 }));
    let mut b = ac.mul_vec(&xi_star[..cfg.n_gc]);
    for (bi, v) in b.iter_mut().zip(ab.mul_vec(&xi_star[cfg.n_gc..])) {
        *bi += v;
    }
    let z = HybridZonotope::new(gc, gb, c, ac, ab, b, Form::Canonical).expect("consistent sizes");
    MilpInstance { z, p: SparseMatrix::zeros(cfg.n, cfg.n), q, xi_star }
}

/// Instance `index` of a batch seeded with `seed`; each instance has its own stream.
pub fn batch_instance(cfg: &MilpConfig, seed: u64, index: usize) -> (MilpInstance, u64) {
    let inst_seed = instance_seed(seed, index);
    (generate(cfg, &mut RngStream::new(inst_seed)), inst_seed)
}

/// Seed of instance `index` in a batch.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}
