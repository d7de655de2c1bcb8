use crate::error::{dim_err, Result};
use crate::kernel::SparseMatrix;
use crate::scalar::{dot, Real};
use crate::sets::HybridZonotope;

/// Objective `½ξᵀP̃ξ + q̃ᵀξ + constant` in factor space.
#[derive(Clone, Debug, PartialEq)]
pub struct CondensedObjective<T> {
    pub p: SparseMatrix<T>,
    pub q: Vec<T>,
    /// `½cᵀPc + qᵀc`, the set-space objective at `ξ = 0`.
    pub constant: T,
}

impl<T: Real> CondensedObjective<T> {
    /// Factor-space objective without the constant term.
    pub fn eval(&self, xi: &[T]) -> T {
        let px = self.p.mul_vec(xi);
        T::lit(0.5) * dot(xi, &px) + dot(&self.q, xi)
    }

    /// Factor-space objective including the constant, equal to the set-space objective at `Gξ + c`.
    pub fn eval_total(&self, xi: &[T]) -> T {
        self.eval(xi) + self.constant
    }
}

/// `P̃ = GᵀPG`, `q̃ = Gᵀ(Pc + q)` with `G = [Gc Gb]`.
pub fn condense_objective<T: Real>(z: &HybridZonotope<T>, p: &SparseMatrix<T>, q: &[T]) -> Result<CondensedObjective<T>> {
    let n = z.dim();
    if p.shape() != (n, n) {
        return dim_err(format!("cost matrix is {}x{}, set dimension is {n}", p.rows(), p.cols()));
    }
    if q.len() != n {
        return dim_err(format!("linear cost has length {}, set dimension is {n}", q.len()));
    }
    let g = z.generators();
    let p_tilde = g.transpose().matmul(&p.matmul(&g)?)?;
    let pc = p.mul_vec(z.c());
    let pcq: Vec<T> = pc.iter().zip(q).map(|(&a, &b)| a + b).collect();
    let constant = T::lit(0.5) * dot(z.c(), &pc) + dot(q, z.c());
    Ok(CondensedObjective { p: symmetrize(&p_tilde), q: g.tr_mul_vec(&pcq), constant })
}

/// Averages a nearly symmetric product with its transpose so rounding in
/// `GᵀPG` cannot trip the factorization's symmetry check.
fn symmetrize<T: Real>(m: &SparseMatrix<T>) -> SparseMatrix<T> {
    m.add(&m.transpose()).expect("square").scale(T::lit(0.5))
}

/// `½zᵀPz + qᵀz`.
pub fn set_objective<T: Real>(p: &SparseMatrix<T>, q: &[T], z: &[T]) -> T {
    T::lit(0.5) * dot(z, &p.mul_vec(z)) + dot(q, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::RngStream;
    use crate::sets::Form;

    #[test]
    fn zero_cost() {
        let z = HybridZonotope::zonotope(SparseMatrix::identity(2), vec![1.0, 2.0], Form::Canonical).unwrap();
        let o = condense_objective(&z, &SparseMatrix::zeros(2, 2), &[0.0, 0.0]).unwrap();
        assert_eq!(o.p.nnz(), 0);
        assert_eq!(o.q, vec![0.0, 0.0]);
    }

    #[test]
    fn scalar_segment() {
        let z = HybridZonotope::zonotope(SparseMatrix::identity(1), vec![0.0], Form::Canonical).unwrap();
        let o = condense_objective(&z, &SparseMatrix::from_diag(&[2.0]), &[1.0]).unwrap();
        assert_eq!(o.p.get(0, 0), 2.0);
        assert_eq!(o.q, vec![1.0]);
        assert_eq!(o.constant, 0.0);
    }

    #[test]
    fn dimension_checked() {
        let z = HybridZonotope::zonotope(SparseMatrix::identity(2), vec![0.0, 0.0], Form::Canonical).unwrap();
        assert!(condense_objective(&z, &SparseMatrix::identity(3), &[0.0; 3]).is_err());
        assert!(condense_objective(&z, &SparseMatrix::identity(2), &[0.0; 3]).is_err());
    }

    #[test]
    fn matches_set_space_objective() {
        let mut rng = RngStream::new(7);
        let u = |rng: &mut RngStream| rng.uniform(-1.0, 1.0).unwrap();
        let (n, ng) = (3, 5);
        let g: Vec<f64> = (0..n * ng).map(|_| u(&mut rng)).collect();
        let l: Vec<f64> = (0..n * n).map(|_| u(&mut rng)).collect();
        // P = L Lᵀ
        let lm = SparseMatrix::from_row_major(n, n, &l).unwrap();
        let p = lm.matmul(&lm.transpose()).unwrap();
        let c: Vec<f64> = (0..n).map(|_| u(&mut rng)).collect();
        let q: Vec<f64> = (0..n).map(|_| u(&mut rng)).collect();
        let gm = SparseMatrix::from_row_major(n, ng, &g).unwrap();
        let z = HybridZonotope::new(
            gm.select_cols(0, 3),
            gm.select_cols(3, 5),
            c,
            SparseMatrix::zeros(0, 3),
            SparseMatrix::zeros(0, 2),
            vec![],
            Form::Canonical,
        )
        .unwrap();
        let o = condense_objective(&z, &p, &q).unwrap();
        for _ in 0..100 {
            let xi: Vec<f64> = (0..ng).map(|_| u(&mut rng)).collect();
            let x = z.point_at(&xi);
            let direct = set_objective(&p, &q, &x);
            assert!((o.eval(&xi) - (direct - o.constant)).abs() < 1e-10);
        }
    }
}
