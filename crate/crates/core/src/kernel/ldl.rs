use crate::error::{dim_err, Error, Result};
use crate::kernel::sparse::SparseMatrix;
use crate::scalar::{norm_inf, Real};

const NONE: usize = usize::MAX;

/// Options for [`SymFactorization::new`].
#[derive(Clone, Debug)]
pub struct FactorOptions<T> {
    /// Expected pivot sign (+1 or −1) for every row of the original matrix.
    /// Enables static and dynamic regularization for quasi-definite systems.
    pub signs: Option<Vec<i8>>,
    /// Added as `sign · static_reg` to every diagonal entry when signs are given.
    pub static_reg: T,
    /// A pivot whose signed value falls below this is replaced by `sign · dynamic_delta`.
    pub dynamic_eps: T,
    pub dynamic_delta: T,
    /// Pivots with `|d| ≤ pivot_tol · max(1, max|M|)` are reported as near zero.
    pub pivot_tol: T,
    pub refine_steps: usize,
    /// Relative residual at which iterative refinement stops.
    pub refine_tol: T,
    /// Eliminate rows `0..k` before all others, each block under its own
    /// minimum-degree ordering. For a quasi-definite matrix with its positive
    /// block first, no negative pivot is then formed before its coupling terms.
    pub leading_block: Option<usize>,
}

impl<T: Real> Default for FactorOptions<T> {
    fn default() -> Self {
        Self {
            signs: None,
            static_reg: T::lit(1e-8),
            dynamic_eps: T::lit(1e-12),
            dynamic_delta: T::lit(1e-7),
            pivot_tol: T::lit(1e-9),
            refine_steps: 10,
            refine_tol: T::lit(1e-13),
            leading_block: None,
        }
    }
}

/// Sparse LDLᵀ factorization of a symmetric (possibly indefinite) matrix
/// under an approximate-minimum-degree ordering.
///
/// When the factorization had to be regularized, solves are corrected by
/// iterative refinement against the original matrix.
#[derive(Clone, Debug)]
pub struct SymFactorization<T> {
    matrix: SparseMatrix<T>,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<T>,
    dinv: Vec<T>,
    near_zero_pivots: usize,
    regularized: bool,
    refine_steps: usize,
    refine_tol: T,
}

/// Factorizes `m` with default options (no regularization).
pub fn factorize_sym<T: Real>(m: &SparseMatrix<T>) -> Result<SymFactorization<T>> {
    SymFactorization::new(m, FactorOptions::default())
}

/// Solves `M x = rhs` with a previously computed factorization.
pub fn solve_sym<T: Real>(f: &SymFactorization<T>, rhs: &[T]) -> Result<Vec<T>> {
    f.solve(rhs)
}

impl<T: Real> SymFactorization<T> {
    pub fn new(m: &SparseMatrix<T>, opts: FactorOptions<T>) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return dim_err(format!("factorization of a non-square {:?} matrix", m.shape()));
        }
        if let Some(s) = &opts.signs {
            if s.len() != n {
                return dim_err("pivot sign vector length");
            }
        }
        let scale = T::one().max(m.max_abs());
        if !m.is_symmetric(T::lit(1e-12) * scale) {
            return Err(Error::InvalidArgument("matrix is not symmetric".into()));
        }
        let (perm, iperm) = match opts.leading_block {
            _ if n == 0 => (Vec::new(), Vec::new()),
            Some(k) if k < n => block_ordering(m, k)?,
            _ => amd_order(m)?,
        };

        // Upper triangle of the permuted matrix, plus static regularization.
        let mut trip: Vec<(usize, usize, T)> = m
            .triplets()
            .filter_map(|(r, c, v)| {
                let (pr, pc) = (iperm[r], iperm[c]);
                (pr <= pc).then_some((pr, pc, v))
            })
            .collect();
        let signs_perm: Option<Vec<T>> = opts.signs.as_ref().map(|s| perm.iter().map(|&o| T::lit(f64::from(s[o]))).collect());
        let mut regularized = false;
        if let Some(sp) = &signs_perm {
            if opts.static_reg > T::zero() {
                regularized = true;
                trip.extend(sp.iter().enumerate().map(|(k, &s)| (k, k, s * opts.static_reg)));
            }
        }
        let a = SparseMatrix::from_triplets_unchecked(n, n, trip);

        let (etree, lnz) = elimination_tree(&a);
        let mut lp = vec![0usize; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }
        let total = lp[n];
        let mut li = vec![0usize; total];
        let mut lx = vec![T::zero(); total];
        let mut d = vec![T::zero(); n];
        let mut dinv = vec![T::zero(); n];
        let mut next = lp[..n].to_vec();
        let mut yvals = vec![T::zero(); n];
        let mut ymark = vec![false; n];
        let mut yidx = Vec::with_capacity(n);
        let mut elim = Vec::with_capacity(n);
        let tol = opts.pivot_tol * scale;
        let mut near_zero = 0;

        for k in 0..n {
            yidx.clear();
            for (bidx, v) in a.col_iter(k) {
                if bidx == k {
                    d[k] = v;
                    continue;
                }
                yvals[bidx] = v;
                if ymark[bidx] {
                    continue;
                }
                ymark[bidx] = true;
                elim.clear();
                elim.push(bidx);
                let mut nx = etree[bidx];
                while nx != NONE && nx < k && !ymark[nx] {
                    ymark[nx] = true;
                    elim.push(nx);
                    nx = etree[nx];
                }
                yidx.extend(elim.drain(..).rev());
            }
            for &c in yidx.iter().rev() {
                let yc = yvals[c];
                let end = next[c];
                for j in lp[c]..end {
                    yvals[li[j]] -= lx[j] * yc;
                }
                li[end] = k;
                lx[end] = yc * dinv[c];
                d[k] -= yc * lx[end];
                next[c] += 1;
                yvals[c] = T::zero();
                ymark[c] = false;
            }
            if !d[k].is_finite() {
                return Err(Error::StructurallySingular(format!("non-finite pivot at step {k}")));
            }
            if d[k].abs() <= tol {
                near_zero += 1;
            }
            if let Some(sp) = &signs_perm {
                if d[k] * sp[k] <= opts.dynamic_eps {
                    d[k] = sp[k] * opts.dynamic_delta;
                    regularized = true;
                }
            }
            if d[k] == T::zero() {
                return Err(Error::StructurallySingular(format!("zero pivot at step {k}")));
            }
            dinv[k] = T::one() / d[k];
        }

        Ok(Self {
            matrix: m.clone(),
            perm,
            lp,
            li,
            lx,
            dinv,
            near_zero_pivots: near_zero,
            regularized,
            refine_steps: opts.refine_steps,
            refine_tol: opts.refine_tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Number of pivots that were numerically zero before any regularization.
    pub fn near_zero_pivots(&self) -> usize {
        self.near_zero_pivots
    }

    pub fn factor_nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn is_regularized(&self) -> bool {
        self.regularized
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if rhs.len() != n {
            return dim_err(format!("right-hand side of length {} for a {n}x{n} factorization", rhs.len()));
        }
        let mut x = vec![T::zero(); n];
        let mut work = vec![T::zero(); n];
        self.raw_solve(rhs, &mut x, &mut work);
        if !self.regularized {
            return Ok(x);
        }
        let bnorm = norm_inf(rhs);
        let mut dx = vec![T::zero(); n];
        for _ in 0..self.refine_steps {
            let mx = self.matrix.mul_vec(&x);
            let r: Vec<T> = rhs.iter().zip(&mx).map(|(&b, &m)| b - m).collect();
            if norm_inf(&r) <= self.refine_tol * (T::one() + bnorm) {
                break;
            }
            self.raw_solve(&r, &mut dx, &mut work);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += *di;
            }
        }
        Ok(x)
    }

    fn raw_solve(&self, rhs: &[T], out: &mut [T], w: &mut [T]) {
        let n = self.dim();
        for k in 0..n {
            w[k] = rhs[self.perm[k]];
        }
        for i in 0..n {
            let wi = w[i];
            for j in self.lp[i]..self.lp[i + 1] {
                w[self.li[j]] -= self.lx[j] * wi;
            }
        }
        for i in 0..n {
            w[i] *= self.dinv[i];
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in self.lp[i]..self.lp[i + 1] {
                s -= self.lx[j] * w[self.li[j]];
            }
            w[i] = s;
        }
        for k in 0..n {
            out[self.perm[k]] = w[k];
        }
    }
}

/// Minimum-degree ordering of the pattern of `m` as `(perm, iperm)`.
fn amd_order<T: Real>(m: &SparseMatrix<T>) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = m.rows();
    // The ordering sees the pattern with a full diagonal; the library
    // expects at least n structural entries.
    let pattern = SparseMatrix::from_triplets_unchecked(
        n,
        n,
        m.triplets().map(|(r, c, _)| (r, c, T::one())).chain((0..n).map(|i| (i, i, T::lit(4.0)))),
    );
    amd::order::<usize>(n, pattern.colptr(), pattern.rowidx(), &amd::Control::default())
        .map(|(p, pi, _)| (p, pi))
        .map_err(|s| Error::StructurallySingular(format!("ordering failed: {s:?}")))
}

/// Rows `0..k` first, then the rest ordered on the pattern of its Schur
/// complement `M₂₂ − M₂₁ M₁₁⁻¹ M₁₂`, approximated by `M₂₂ + M₂₁ M₂₁ᵀ`.
fn block_ordering<T: Real>(m: &SparseMatrix<T>, k: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = m.rows();
    let ones = |it: &mut dyn Iterator<Item = (usize, usize, T)>| it.map(|(r, c, _)| (r, c, T::one())).collect::<Vec<_>>();
    let lead = SparseMatrix::from_triplets_unchecked(k, k, ones(&mut m.triplets().filter(|&(r, c, _)| r < k && c < k)));
    let coupling = SparseMatrix::from_triplets_unchecked(
        n - k,
        k,
        ones(&mut m.triplets().filter(|&(r, c, _)| r >= k && c < k).map(|(r, c, v)| (r - k, c, v))),
    );
    let trail = SparseMatrix::from_triplets_unchecked(
        n - k,
        n - k,
        ones(&mut m.triplets().filter(|&(r, c, _)| r >= k && c >= k).map(|(r, c, v)| (r - k, c - k, v))),
    );
    let schur = trail.add(&coupling.matmul(&coupling.transpose())?)?;
    let (p1, _) = if k == 0 { (Vec::new(), Vec::new()) } else { amd_order(&lead)? };
    let (p2, _) = amd_order(&schur)?;
    let perm: Vec<usize> = p1.into_iter().chain(p2.into_iter().map(|i| i + k)).collect();
    let mut iperm = vec![0; n];
    for (pos, &orig) in perm.iter().enumerate() {
        iperm[orig] = pos;
    }
    Ok((perm, iperm))
}

/// Elimination tree of an upper-triangular pattern and the column counts of L.
fn elimination_tree<T: Real>(a: &SparseMatrix<T>) -> (Vec<usize>, Vec<usize>) {
    let n = a.cols();
    let mut etree = vec![NONE; n];
    let mut lnz = vec![0usize; n];
    let mut work = vec![NONE; n];
    for j in 0..n {
        work[j] = j;
        for (mut i, _) in a.col_iter(j) {
            while work[i] != j {
                if etree[i] == NONE {
                    etree[i] = j;
                }
                lnz[i] += 1;
                work[i] = j;
                i = etree[i];
            }
        }
    }
    (etree, lnz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_solve(m: &SparseMatrix<f64>, b: &[f64]) -> Vec<f64> {
        let n = m.rows();
        let d = DMatrix::from_fn(n, n, |r, c| m.get(r, c));
        d.lu().solve(&DVector::from_column_slice(b)).unwrap().as_slice().to_vec()
    }

    fn residual(m: &SparseMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
        m.mul_vec(x).iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_solve() {
        let f = factorize_sym(&SparseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(solve_sym(&f, &[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(solve_sym(&f, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two() {
        let m = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x: Vec<f64> = solve_sym(&factorize_sym(&m).unwrap(), &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn leading_block_is_eliminated_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, m) = (12, 5);
        let mut rows = vec![vec![0.0; n + m]; n + m];
        for i in 0..n {
            rows[i][i] = 1.0 + rng.gen::<f64>();
        }
        for r in 0..m {
            for c in 0..n {
                if rng.gen_bool(0.4) || c == r {
                    let v = rng.gen_range(-1.0..1.0);
                    rows[n + r][c] = v;
                    rows[c][n + r] = v;
                }
            }
        }
        let k = SparseMatrix::from_dense(&rows).unwrap();
        let signs = (0..n).map(|_| 1).chain((0..m).map(|_| -1)).collect();
        let opts = FactorOptions { signs: Some(signs), static_reg: 0.0, leading_block: Some(n), ..FactorOptions::default() };
        let f = SymFactorization::new(&k, opts).unwrap();
        assert!(f.perm[..n].iter().all(|&i| i < n));
        assert!(!f.is_regularized());
        let b: Vec<f64> = (0..n + m).map(|i| (i as f64).cos()).collect();
        let x = f.solve(&b).unwrap();
        for (a, w) in x.iter().zip(dense_solve(&k, &b)) {
            assert!((a - w).abs() <= 1e-10);
        }
    }

    #[test]
    fn saddle_matches_dense_elimination() {
        let m = SparseMatrix::from_dense(&[vec![10.0, 0.0, 1.0], vec![0.0, 10.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = solve_sym(&factorize_sym(&m).unwrap(), &b).unwrap();
        let want = dense_solve(&m, &b);
        for (a, w) in x.iter().zip(&want) {
            assert!((a - w).abs() <= 1e-10);
        }
    }

    #[test]
    fn random_spd_matches_dense_and_is_repeatable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10;
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let spd = &b * b.transpose() + DMatrix::identity(n, n);
        let m = SparseMatrix::from_row_major(n, n, spd.transpose().as_slice()).unwrap();
        let f = factorize_sym(&m).unwrap();
        let rhs: Vec<f64> = (0..n).map(|i| i as f64 - 4.0).collect();
        let x = f.solve(&rhs).unwrap();
        assert!(residual(&m, &x, &rhs) <= 1e-10);
        let want = dense_solve(&m, &rhs);
        for (a, w) in x.iter().zip(&want) {
            assert!((a - w).abs() <= 1e-10);
        }
        let again = f.solve(&rhs).unwrap();
        assert!(x.iter().zip(&again).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn reports_dimension_mismatch() {
        let f = factorize_sym(&SparseMatrix::<f64>::identity(2)).unwrap();
        assert!(matches!(f.solve(&[1.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn zero_matrix_is_singular() {
        assert!(matches!(factorize_sym(&SparseMatrix::<f64>::zeros(2, 2)), Err(Error::StructurallySingular(_))));
    }

    #[test]
    fn f32_factorization() {
        let m = SparseMatrix::<f32>::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = factorize_sym(&m).unwrap().solve(&[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-5);
    }

    fn quasi_definite(seed: u64, n: usize, m: usize) -> (SparseMatrix<f64>, Vec<i8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| if rng.random_bool(0.3) { rng.random_range(-1.0..1.0) } else { 0.0 });
        let p = &g * g.transpose() + DMatrix::identity(n, n) * 0.5;
        let a = DMatrix::from_fn(m, n, |r, c| if r == c || rng.random_bool(0.4) { rng.random_range(-1.0..1.0) + if r == c { 2.0 } else { 0.0 } } else { 0.0 });
        let mut trip = Vec::new();
        for r in 0..n {
            for c in 0..n {
                trip.push((r, c, p[(r, c)]));
            }
        }
        for r in 0..m {
            for c in 0..n {
                trip.push((n + r, c, a[(r, c)]));
                trip.push((c, n + r, a[(r, c)]));
            }
        }
        let signs = (0..n + m).map(|i| if i < n { 1 } else { -1 }).collect();
        (SparseMatrix::from_triplets(n + m, n + m, trip).unwrap(), signs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn quasi_definite_round_trip(seed in 0u64..10_000, n in 2usize..12, m in 1usize..4) {
            let m = m.min(n);
            let (k, signs) = quasi_definite(seed, n, m);
            let f = SymFactorization::new(&k, FactorOptions { signs: Some(signs), ..Default::default() }).unwrap();
            let rhs: Vec<f64> = (0..n + m).map(|i| ((i * 7 + seed as usize) % 5) as f64 - 2.0).collect();
            let x = f.solve(&rhs).unwrap();
            let scale = rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            prop_assert!(residual(&k, &x, &rhs) <= 1e-8 * scale.max(1e-300));
        }
    }
}
