use crate::error::{dim_err, Error, Result};
use crate::kernel::{solve_lp, LinearProgram, LpStatus};
use crate::scalar::{norm_inf, Real};
use crate::sets::{convex_relaxation, HybridZonotope};

/// Largest binary-factor count accepted by [`contains_point`].
pub const MAX_ENUMERATED_BINARIES: usize = 20;

/// Whether `x` is a member of `z` up to `tol` in both the point and the
/// constraint residual.
///
/// Binary patterns are enumerated by depth-first branch and bound; each node
/// solves an exact LP that minimizes the ℓ1 norm of the stacked residual
/// `[Gξ + c − x; Aξ − b]`. A leaf accepts when the ∞-norm of that residual is
/// within `tol`.
pub fn contains_point<T: Real>(z: &HybridZonotope<T>, x: &[T], tol: T) -> Result<bool> {
    Ok(find_witness(z, x, tol)?.is_some())
}

/// Like [`contains_point`], returning the admissible factor vector found.
pub fn find_witness<T: Real>(z: &HybridZonotope<T>, x: &[T], tol: T) -> Result<Option<Vec<T>>> {
    if x.len() != z.dim() {
        return dim_err(format!("point of length {} tested against a set of dimension {}", x.len(), z.dim()));
    }
    if z.n_gb() > MAX_ENUMERATED_BINARIES {
        return Err(Error::TooManyBinaries(z.n_gb()));
    }
    let search = WitnessSearch::new(z, x, tol);
    let lo = vec![z.form().lower::<T>(); z.n_g()];
    let hi = vec![z.form().upper::<T>(); z.n_g()];
    Ok(search.branch(lo, hi))
}

struct WitnessSearch<'a, T> {
    z: &'a HybridZonotope<T>,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    tol: T,
}

impl<'a, T: Real> WitnessSearch<'a, T> {
    fn new(z: &'a HybridZonotope<T>, x: &[T], tol: T) -> Self {
        let g = z.generators().to_dense();
        let a = z.constraints().to_dense();
        let rhs = x.iter().zip(z.c()).map(|(&xi, &ci)| xi - ci).chain(z.b().iter().copied()).collect();
        Self { z, rows: g.into_iter().chain(a).collect(), rhs, tol }
    }

    /// Minimum ℓ1 residual with factors restricted to `[lo, hi]`.
    fn relax(&self, lo: &[T], hi: &[T]) -> Option<(T, Vec<T>)> {
        let ng = lo.len();
        let m = self.rows.len();
        let width = ng + 2 * m;
        let a: Vec<Vec<T>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = vec![T::zero(); width];
                r[..ng].copy_from_slice(row);
                r[ng + i] = T::one();
                r[ng + m + i] = -T::one();
                r
            })
            .collect();
        let mut cost = vec![T::zero(); width];
        cost[ng..].iter_mut().for_each(|c| *c = T::one());
        let mut lower = lo.to_vec();
        lower.extend(std::iter::repeat_n(T::zero(), 2 * m));
        let mut upper = hi.to_vec();
        upper.extend(std::iter::repeat_n(T::infinity(), 2 * m));
        let sol = solve_lp(&LinearProgram { cost, a, b: self.rhs.clone(), lower, upper });
        (sol.status == LpStatus::Optimal).then(|| (sol.objective, sol.x[..ng].to_vec()))
    }

    fn residual(&self, xi: &[T]) -> T {
        let r: Vec<T> = self.rows.iter().zip(&self.rhs).map(|(row, &b)| row.iter().zip(xi).map(|(&a, &v)| a * v).sum::<T>() - b).collect();
        norm_inf(&r)
    }

    fn branch(&self, lo: Vec<T>, hi: Vec<T>) -> Option<Vec<T>> {
        let (l1, xi) = self.relax(&lo, &hi)?;
        let m = T::count(self.rows.len().max(1));
        if l1 > m * self.tol {
            return None;
        }
        let (blo, bhi) = (self.z.form().lower::<T>(), self.z.form().upper::<T>());
        let nc = self.z.n_gc();
        let mut snapped = xi.clone();
        for v in &mut snapped[nc..] {
            *v = if (*v - blo).abs() <= (*v - bhi).abs() { blo } else { bhi };
        }
        if self.residual(&snapped) <= self.tol {
            return Some(snapped);
        }
        let free = (nc..xi.len())
            .filter(|&j| lo[j] != hi[j])
            .max_by(|&a, &b| {
                let fa = (xi[a] - blo).min(bhi - xi[a]);
                let fb = (xi[b] - blo).min(bhi - xi[b]);
                fa.partial_cmp(&fb).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a))
            })?;
        let first = if (xi[free] - blo).abs() <= (xi[free] - bhi).abs() { blo } else { bhi };
        for v in [first, blo + bhi - first] {
            let (mut l2, mut h2) = (lo.clone(), hi.clone());
            l2[free] = v;
            h2[free] = v;
            if let Some(w) = self.branch(l2, h2) {
                return Some(w);
            }
        }
        None
    }
}

/// Support function `max { dᵀx : x ∈ CR(z) }` of the convex relaxation,
/// or `None` when the relaxation is empty.
pub fn support_convex_relaxation<T: Real>(z: &HybridZonotope<T>, d: &[T]) -> Result<Option<T>> {
    if d.len() != z.dim() {
        return dim_err("direction length differs from set dimension");
    }
    let cr = convex_relaxation(z);
    let g = cr.gc();
    let cost: Vec<T> = g.tr_mul_vec(d).into_iter().map(|v| -v).collect();
    let ng = cr.n_gc();
    let sol = solve_lp(&LinearProgram {
        cost,
        a: cr.ac().to_dense(),
        b: cr.b().to_vec(),
        lower: vec![cr.form().lower::<T>(); ng],
        upper: vec![cr.form().upper::<T>(); ng],
    });
    match sol.status {
        LpStatus::Optimal => {
            let dc: T = d.iter().zip(cr.c()).map(|(&a, &b)| a * b).sum();
            Ok(Some(dc - sol.objective))
        }
        LpStatus::Infeasible => Ok(None),
        s => Err(Error::InvalidArgument(format!("support LP ended with {s:?}"))),
    }
}
