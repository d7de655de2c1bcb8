use crate::error::{dim_err, Error, Result};
use crate::kernel::{factorize_sym, remove_redundant_rows, FactorOptions, SparseMatrix, SymFactorization};
use crate::scalar::{rank_tolerance, Real};

/// `M = [[P̃ + ρI, Aᵀ], [A, 0]]`.
pub fn kkt_matrix<T: Real>(p_tilde: &SparseMatrix<T>, a: &SparseMatrix<T>, rho: T) -> Result<SparseMatrix<T>> {
    let n = p_tilde.rows();
    if p_tilde.cols() != n || a.cols() != n {
        return dim_err(format!("KKT blocks: P̃ is {}x{}, A is {}x{}", n, p_tilde.cols(), a.rows(), a.cols()));
    }
    let m = a.rows();
    let h = p_tilde.add(&SparseMatrix::identity(n).scale(rho))?;
    let at = a.transpose();
    let zero = SparseMatrix::zeros(m, m);
    let top = SparseMatrix::hstack(&[&h, &at])?;
    let bottom = SparseMatrix::hstack(&[a, &zero])?;
    SparseMatrix::vstack(&[&top, &bottom])
}

/// Factorizes the KKT matrix after confirming that `A` has full row rank.
///
/// Rank deficiency is reported as [`Error::StructurallySingular`] so the
/// caller can drop redundant rows and retry.
pub fn build_kkt<T: Real>(p_tilde: &SparseMatrix<T>, a: &SparseMatrix<T>, rho: T) -> Result<SymFactorization<T>> {
    check_full_row_rank(a)?;
    let m = kkt_matrix(p_tilde, a, rho)?;
    let n = p_tilde.rows();
    let signs = (0..n).map(|_| 1).chain((0..a.rows()).map(|_| -1)).collect();
    // Eliminating the primal block first keeps every negative pivot away
    // from zero, so no static regularization is needed.
    let opts = FactorOptions { signs: Some(signs), static_reg: T::zero(), leading_block: Some(n), ..FactorOptions::default() };
    SymFactorization::new(&m, opts)
}

fn gram<T: Real>(a: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
    let g = a.matmul(&a.transpose())?;
    // exact symmetry regardless of summation order
    Ok(g.add(&g.transpose())?.scale(T::lit(0.5)))
}

fn check_full_row_rank<T: Real>(a: &SparseMatrix<T>) -> Result<SymFactorization<T>> {
    if a.rows() == 0 {
        return factorize_sym(&SparseMatrix::zeros(0, 0));
    }
    let f = factorize_sym(&gram(a)?)?;
    if f.near_zero_pivots() > 0 {
        return Err(Error::StructurallySingular(format!("{} dependent constraint rows", f.near_zero_pivots())));
    }
    Ok(f)
}

/// Removes dependent rows of `A ξ = b` only when the KKT factorization needs it.
pub fn full_rank_constraints<T: Real>(a: &SparseMatrix<T>, b: &[T]) -> Result<(SparseMatrix<T>, Vec<T>)> {
    match check_full_row_rank(a) {
        Ok(_) => Ok((a.clone(), b.to_vec())),
        Err(Error::StructurallySingular(_)) => {
            let (a2, b2) = remove_redundant_rows(a, b, rank_tolerance())?;
            check_full_row_rank(&a2)?;
            Ok((a2, b2))
        }
        Err(e) => Err(e),
    }
}

/// Euclidean projection onto `{ ξ : Aξ = b }` for full-row-rank `A`.
#[derive(Clone, Debug)]
pub struct AffineProjector<T> {
    a: SparseMatrix<T>,
    b: Vec<T>,
    gram: SymFactorization<T>,
}

impl<T: Real> AffineProjector<T> {
    pub fn new(a: SparseMatrix<T>, b: Vec<T>) -> Result<Self> {
        if b.len() != a.rows() {
            return dim_err(format!("{} right-hand sides for {} rows", b.len(), a.rows()));
        }
        let gram = check_full_row_rank(&a)?;
        Ok(Self { a, b, gram })
    }

    /// Like [`AffineProjector::new`], dropping dependent rows first when `a`
    /// is rank deficient. Inconsistent systems are reported as
    /// [`Error::InconsistentSystem`].
    pub fn reduced(a: SparseMatrix<T>, b: Vec<T>) -> Result<Self> {
        match Self::new(a.clone(), b.clone()) {
            Err(Error::StructurallySingular(_)) => {
                let (a2, b2) = remove_redundant_rows(&a, &b, rank_tolerance())?;
                Self::new(a2, b2)
            }
            other => other,
        }
    }

    pub fn a(&self) -> &SparseMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `v − Aᵀ(AAᵀ)⁻¹(Av − b)`.
    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.a.cols() {
            return dim_err(format!("vector of length {} projected in dimension {}", v.len(), self.a.cols()));
        }
        if self.a.rows() == 0 {
            return Ok(v.to_vec());
        }
        let r: Vec<T> = self.a.mul_vec(v).into_iter().zip(&self.b).map(|(x, &y)| x - y).collect();
        let y = self.gram.solve(&r)?;
        let corr = self.a.tr_mul_vec(&y);
        Ok(v.iter().zip(corr).map(|(&x, c)| x - c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn kkt_solve_matches_dense() {
        let p = SparseMatrix::<f64>::zeros(2, 2);
        let a = SparseMatrix::from_dense(&[vec![1.0, 1.0]]).unwrap();
        let f = build_kkt(&p, &a, 10.0).unwrap();
        let rhs = [0.3, -1.2, 2.0];
        let x = f.solve(&rhs).unwrap();
        let m = DMatrix::from_row_slice(3, 3, &[10.0, 0.0, 1.0, 0.0, 10.0, 1.0, 1.0, 1.0, 0.0]);
        let oracle = m.lu().solve(&DVector::from_row_slice(&rhs)).unwrap();
        for i in 0..3 {
            assert!((x[i] - oracle[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_only_touches_diagonal_block() {
        let p = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let a = SparseMatrix::from_dense(&[vec![1.0, -1.0]]).unwrap();
        let m1 = kkt_matrix(&p, &a, 10.0).unwrap();
        let m2 = kkt_matrix(&p, &a, 20.0).unwrap();
        let diff = m2.add(&m1.scale(-1.0)).unwrap();
        let expected: Vec<(usize, usize, f64)> = vec![(0, 0, 10.0), (1, 1, 10.0)];
        assert_eq!(diff.triplets().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn duplicate_rows_need_removal() {
        let p = SparseMatrix::<f64>::identity(3);
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![1.0, 2.0, 0.0]]).unwrap();
        let b = vec![1.0, 1.0];
        assert!(matches!(build_kkt(&p, &a, 1.0), Err(Error::StructurallySingular(_))));
        let (a2, b2) = full_rank_constraints(&a, &b).unwrap();
        assert_eq!(a2.rows(), 1);
        assert_eq!(b2, vec![1.0]);
        assert!(build_kkt(&p, &a2, 1.0).is_ok());
    }

    #[test]
    fn projection_examples() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0]]).unwrap();
        let pr = AffineProjector::new(a, vec![0.0]).unwrap();
        assert_eq!(pr.project(&[3.0, 4.0]).unwrap(), vec![0.0, 4.0]);
        assert_eq!(pr.project(&[0.0, -2.0]).unwrap(), vec![0.0, -2.0]);
        let empty = AffineProjector::new(SparseMatrix::<f64>::zeros(0, 2), vec![]).unwrap();
        assert_eq!(empty.project(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    }
}
