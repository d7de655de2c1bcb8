#![allow(dead_code)]

use hzplan::kernel::{RngStream, SparseMatrix};
use hzplan::sets::{Form, HybridZonotope};

pub fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    rng.uniform(lo, hi).unwrap()
}

pub fn dense_random(rng: &mut RngStream, rows: usize, cols: usize) -> SparseMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| uniform(rng, -1.0, 1.0)).collect();
    SparseMatrix::from_row_major(rows, cols, &data).unwrap()
}

/// Factor vector drawn from the mixed-integer box of `form`.
pub fn random_factors(rng: &mut RngStream, n_gc: usize, n_gb: usize, form: Form) -> Vec<f64> {
    let (lo, hi) = (form.lower::<f64>(), form.upper::<f64>());
    let mut xi: Vec<f64> = (0..n_gc).map(|_| uniform(rng, lo, hi)).collect();
    xi.extend((0..n_gb).map(|_| if rng.bernoulli(0.5) { hi } else { lo }));
    xi
}

/// Dense random hybrid zonotope made nonempty by setting `b = A ξ*`;
/// returns the set and `ξ*`.
pub fn random_hz(rng: &mut RngStream, n: usize, n_gc: usize, n_gb: usize, n_c: usize, form: Form) -> (HybridZonotope<f64>, Vec<f64>) {
    let gc = dense_random(rng, n, n_gc);
    let gb = dense_random(rng, n, n_gb);
    let c: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
    let ac = dense_random(rng, n_c, n_gc);
    let ab = dense_random(rng, n_c, n_gb);
    let xi = random_factors(rng, n_gc, n_gb, form);
    let mut b = ac.mul_vec(&xi[..n_gc]);
    for (bi, v) in b.iter_mut().zip(ab.mul_vec(&xi[n_gc..])) {
        *bi += v;
    }
    (HybridZonotope::new(gc, gb, c, ac, ab, b, form).unwrap(), xi)
}

pub fn form_of(rng: &mut RngStream) -> Form {
    if rng.bernoulli(0.5) {
        Form::Canonical
    } else {
        Form::ZeroOne
    }
}

pub fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
