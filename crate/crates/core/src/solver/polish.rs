use crate::error::{Error, Result};
use crate::kernel::{independent_rows, SparseMatrix};
use crate::scalar::{norm_inf, rank_tolerance, Real};
use crate::sets::{Form, HybridZonotope};

use super::kkt::AffineProjector;

const CLAMP_ROUNDS: usize = 10;
/// Largest `‖Aζ − b‖∞` accepted for a polished point.
pub(crate) const POLISH_ACCEPT: f64 = 1e-6;

fn residual<T: Real>(a: &SparseMatrix<T>, x: &[T], b: &[T]) -> T {
    let ax = a.mul_vec(x);
    let r: Vec<T> = ax.iter().zip(b).map(|(&p, &q)| p - q).collect();
    norm_inf(&r)
}

/// Repairs the continuous factors of near-feasible iterates for one set.
///
/// Rows of `Ac` that are dependent stay dependent whatever columns are
/// later pinned, so they are found once here and left out of every
/// projection; the final residual check still covers them.
pub(crate) struct Polisher<'a, T> {
    z: &'a HybridZonotope<T>,
    rows: Vec<usize>,
    ac: SparseMatrix<T>,
}

impl<'a, T: Real> Polisher<'a, T> {
    pub(crate) fn new(z: &'a HybridZonotope<T>) -> Result<Self> {
        let rows = independent_rows(z.ac(), &vec![T::zero(); z.n_c()], rank_tolerance())?;
        Ok(Self { z, ac: z.ac().select_rows(&rows), rows })
    }

    /// With the binaries of `zeta` fixed, moves its continuous part into
    /// `{ ξc in the box : Ac ξc = b − Ab ζb }`.
    ///
    /// Returns a factor vector with `‖Aζ − b‖∞ ≤ POLISH_ACCEPT`, or `None`
    /// when none was found, which in practice means the binary pattern is
    /// infeasible.
    pub(crate) fn polish(&self, zeta: &[T]) -> Result<Option<Vec<T>>> {
        let z = self.z;
        if z.n_c() == 0 {
            return Ok(Some(zeta.to_vec()));
        }
        let accept = T::lit(POLISH_ACCEPT);
        let (cont, bin) = zeta.split_at(z.n_gc());
        let ab = z.ab().mul_vec(bin);
        let rhs: Vec<T> = z.b().iter().zip(&ab).map(|(&b, &v)| b - v).collect();
        if residual(z.ac(), cont, &rhs) <= accept {
            return Ok(Some(zeta.to_vec()));
        }
        if z.n_gc() == 0 {
            return Ok(None);
        }
        let reduced: Vec<T> = self.rows.iter().map(|&r| rhs[r]).collect();
        match clamp_project(&self.ac, &reduced, cont, z.form())? {
            Some(mut x) if residual(z.ac(), &x, &rhs) <= accept => {
                x.extend_from_slice(bin);
                Ok(Some(x))
            }
            _ => Ok(None),
        }
    }
}

/// Projects `v` onto `{ Ax = b }`, pins every coordinate that leaves the
/// box to its nearest bound and repeats on the remaining coordinates.
/// Returns `None` if the reduced system becomes inconsistent or the pinning
/// does not settle.
fn clamp_project<T: Real>(a: &SparseMatrix<T>, b: &[T], v: &[T], form: Form) -> Result<Option<Vec<T>>> {
    let (lo, hi) = (form.lower::<T>(), form.upper::<T>());
    let mut pinned: Vec<Option<T>> = vec![None; v.len()];
    for _ in 0..CLAMP_ROUNDS {
        let free: Vec<usize> = (0..v.len()).filter(|&j| pinned[j].is_none()).collect();
        let mut slot = vec![usize::MAX; v.len()];
        for (i, &j) in free.iter().enumerate() {
            slot[j] = i;
        }
        let mut rhs = b.to_vec();
        let mut trip = Vec::new();
        for (r, c, x) in a.triplets() {
            match pinned[c] {
                Some(p) => rhs[r] = rhs[r] - x * p,
                None => trip.push((r, slot[c], x)),
            }
        }
        let af = SparseMatrix::from_triplets(a.rows(), free.len(), trip)?;
        let proj = match AffineProjector::reduced(af, rhs) {
            Ok(p) => p,
            Err(Error::InconsistentSystem { .. }) | Err(Error::StructurallySingular(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let vf: Vec<T> = free.iter().map(|&j| v[j]).collect();
        let xf = proj.project(&vf)?;
        let mut clean = true;
        for (&j, &x) in free.iter().zip(&xf) {
            if x < lo || x > hi {
                pinned[j] = Some(x.max(lo).min(hi));
                clean = false;
            }
        }
        if clean {
            let mut out = vec![T::zero(); v.len()];
            for (j, o) in out.iter_mut().enumerate() {
                *o = pinned[j].unwrap_or_else(|| xf[slot[j]]);
            }
            return Ok(Some(out));
        }
    }
    Ok(None)
}
