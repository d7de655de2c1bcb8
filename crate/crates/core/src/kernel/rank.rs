use crate::error::{Error, Result};
use crate::kernel::sparse::SparseMatrix;
use crate::scalar::Real;

type SparseRow<T> = Vec<(usize, T)>;

/// Indices of a maximal linearly independent subset of the rows of `[A b]`.
///
/// Rows are eliminated in order against the pivots found so far; a row whose
/// remainder has no entry above `tol` is redundant, and if its right-hand
/// side remainder exceeds `tol` the system is inconsistent.
pub fn independent_rows<T: Real>(a: &SparseMatrix<T>, b: &[T], tol: T) -> Result<Vec<usize>> {
    if b.len() != a.rows() {
        return crate::error::dim_err("right-hand side length differs from row count");
    }
    let at = a.transpose();
    let mut pivots: Vec<(usize, SparseRow<T>, T)> = Vec::new();
    let mut keep = Vec::new();
    let drop_tol = tol * T::lit(1e-3);
    for r in 0..a.rows() {
        let mut row: SparseRow<T> = at.col_iter(r).collect();
        let mut rhs = b[r];
        for (pc, prow, prhs) in &pivots {
            if let Ok(k) = row.binary_search_by_key(pc, |e| e.0) {
                let pv = prow.binary_search_by_key(pc, |e| e.0).map(|i| prow[i].1).expect("pivot entry");
                let factor = row[k].1 / pv;
                row = axpy_rows(&row, prow, -factor, drop_tol);
                rhs -= factor * *prhs;
            }
        }
        let best = row.iter().copied().fold(None, |acc: Option<(usize, T)>, (c, v)| match acc {
            Some((_, bv)) if bv.abs() >= v.abs() => acc,
            _ => Some((c, v)),
        });
        match best {
            Some((c, v)) if v.abs() > tol => {
                pivots.push((c, row, rhs));
                keep.push(r);
            }
            _ if rhs.abs() > tol => return Err(Error::InconsistentSystem { residual: rhs.as_f64() }),
            _ => {}
        }
    }
    Ok(keep)
}

/// Drops linearly dependent rows of `A ξ = b`, keeping the original rows
/// that form a full-row-rank subsystem with the same solution set.
pub fn remove_redundant_rows<T: Real>(a: &SparseMatrix<T>, b: &[T], tol: T) -> Result<(SparseMatrix<T>, Vec<T>)> {
    let keep = independent_rows(a, b, tol)?;
    Ok((a.select_rows(&keep), keep.iter().map(|&r| b[r]).collect()))
}

fn axpy_rows<T: Real>(x: &[(usize, T)], y: &[(usize, T)], alpha: T, drop: T) -> SparseRow<T> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (c, v) = match (x.get(i), y.get(j)) {
            (Some(&(cx, vx)), Some(&(cy, vy))) if cx == cy => {
                i += 1;
                j += 1;
                (cx, vx + alpha * vy)
            }
            (Some(&(cx, vx)), Some(&(cy, _))) if cx < cy => {
                i += 1;
                (cx, vx)
            }
            (Some(&(cx, vx)), None) => {
                i += 1;
                (cx, vx)
            }
            (_, Some(&(cy, vy))) => {
                j += 1;
                (cy, alpha * vy)
            }
            (None, None) => unreachable!(),
        };
        if v.abs() > drop {
            out.push((c, v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rank(m: &SparseMatrix<f64>) -> usize {
        let d = DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c));
        d.rank(1e-9)
    }

    #[test]
    fn duplicated_row() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let (a2, b2) = remove_redundant_rows(&a, &[1.0, 1.0], 1e-9).unwrap();
        assert_eq!(a2.to_dense(), vec![vec![1.0, 0.0]]);
        assert_eq!(b2, vec![1.0]);
    }

    #[test]
    fn contradictory_rows() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(remove_redundant_rows(&a, &[1.0, 2.0], 1e-9), Err(Error::InconsistentSystem { .. })));
    }

    #[test]
    fn rank_three_system_keeps_solution_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
        let r = DMatrix::from_fn(3, 6, |_, _| rng.random_range(-1.0..1.0));
        let dense = l * r;
        let a = SparseMatrix::from_row_major(5, 6, dense.transpose().as_slice()).unwrap();
        let x0: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = a.mul_vec(&x0);
        let (a2, b2) = remove_redundant_rows(&a, &b, 1e-9).unwrap();
        assert_eq!(a2.rows(), 3);
        assert_eq!(rank(&a2), 3);
        // Points satisfying the reduced system satisfy the original one: sample
        // them as x0 plus null-space directions of the reduced matrix.
        let d2 = DMatrix::from_fn(3, 6, |r, c| a2.get(r, c));
        let svd = d2.svd(false, true);
        let vt = svd.v_t.unwrap();
        for _ in 0..100 {
            let mut x = x0.clone();
            for k in 3..vt.nrows() {
                let w: f64 = rng.random_range(-1.0..1.0);
                for j in 0..6 {
                    x[j] += w * vt[(k, j)];
                }
            }
            let res = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(res < 1e-9);
            let res2 = a2.mul_vec(&x).iter().zip(&b2).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(res2 < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn idempotent(entries in proptest::collection::vec((0usize..6, 0usize..5, -2i32..3), 1..25), x in proptest::collection::vec(-1.0f64..1.0, 5)) {
            let a = SparseMatrix::from_triplets(6, 5, entries.iter().map(|&(r, c, v)| (r, c, v as f64))).unwrap();
            let b = a.mul_vec(&x);
            let (a1, b1) = remove_redundant_rows(&a, &b, 1e-9).unwrap();
            let (a2, b2) = remove_redundant_rows(&a1, &b1, 1e-9).unwrap();
            prop_assert_eq!(&a1, &a2);
            prop_assert_eq!(&b1, &b2);
            prop_assert_eq!(a1.rows(), rank(&a));
        }
    }
}
