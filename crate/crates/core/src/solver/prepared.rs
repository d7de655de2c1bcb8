use crate::error::Result;
use crate::kernel::{SparseMatrix, SymFactorization};
use crate::sets::HybridZonotope;
use crate::scalar::Real;

use super::iterate::MiBox;
use super::kkt::{build_kkt, full_rank_constraints, AffineProjector};
use super::objective::{condense_objective, CondensedObjective};

/// Problem data shared by the convex and mixed-integer iterations.
pub(crate) struct Prepared<T> {
    pub g: SparseMatrix<T>,
    pub c: Vec<T>,
    pub p: SparseMatrix<T>,
    pub q: Vec<T>,
    pub obj: CondensedObjective<T>,
    pub b: Vec<T>,
    pub kkt: SymFactorization<T>,
    pub proj: AffineProjector<T>,
    pub mibox: MiBox,
}

impl<T: Real> Prepared<T> {
    pub fn new(z: &HybridZonotope<T>, p: &SparseMatrix<T>, q: &[T], rho: T) -> Result<Self> {
        let obj = condense_objective(z, p, q)?;
        let a = z.constraints();
        let (a, b) = full_rank_constraints(&a, z.b())?;
        let kkt = build_kkt(&obj.p, &a, rho)?;
        let proj = AffineProjector::new(a, b.clone())?;
        Ok(Self {
            g: z.generators(),
            c: z.c().to_vec(),
            p: p.clone(),
            q: q.to_vec(),
            obj,
            b,
            kkt,
            proj,
            mibox: MiBox::new(z.n_gc(), z.n_gb(), z.form()),
        })
    }

    pub fn point(&self, zeta: &[T]) -> Vec<T> {
        self.g.mul_vec(zeta).into_iter().zip(&self.c).map(|(a, &b)| a + b).collect()
    }

    /// Center of the factor box, the cold starting point of the convex solver.
    pub fn box_center(&self) -> Vec<T> {
        let f = self.mibox.form;
        vec![(f.lower::<T>() + f.upper::<T>()) * T::lit(0.5); self.mibox.len()]
    }
}
