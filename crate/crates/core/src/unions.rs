//! Hybrid-zonotope representations of finite unions of sets.
//!
//! All identities take and return sets in zero-one form. Each constituent
//! gets one indicator binary and a final row forces exactly one indicator to
//! be set.

use crate::error::{dim_err, Error, Result};
use crate::kernel::SparseMatrix;
use crate::scalar::Real;
use crate::sets::{Form, HybridZonotope};

/// Which union identity to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnionKind {
    Sharp,
    Condensed,
    Zonotope,
}

/// Shared generators of a collection of zonotopes and where they occur.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceMatrix<T> {
    /// Shared generator matrix `G̃` (n × n_G̃).
    pub shared: SparseMatrix<T>,
    /// `M_ji = 1` iff shared generator j belongs to constituent i.
    pub m: SparseMatrix<T>,
    /// Row sums of `M`.
    pub counts: Vec<usize>,
    /// For every constituent, the shared column used by each of its generators.
    pub columns: Vec<Vec<usize>>,
}

fn check_collection<T: Real>(sets: &[HybridZonotope<T>]) -> Result<usize> {
    let first = sets.first().ok_or(Error::EmptyUnion)?;
    let n = first.dim();
    for z in sets {
        if z.form() != Form::ZeroOne {
            return Err(Error::FormMismatch);
        }
        if z.dim() != n {
            return dim_err(format!("union of sets with dimensions {n} and {}", z.dim()));
        }
    }
    Ok(n)
}

fn ones_col<T: Real>(len: usize) -> SparseMatrix<T> {
    SparseMatrix::column(&vec![T::one(); len])
}

fn indicator_row<T: Real>(sets: &[HybridZonotope<T>]) -> SparseMatrix<T> {
    let mut col = 0;
    let mut trip = Vec::new();
    for z in sets {
        col += z.n_gb();
        trip.push((0, col, T::one()));
        col += 1;
    }
    SparseMatrix::from_triplets_unchecked(1, col, trip)
}

fn union_from_blocks<T: Real>(
    n: usize,
    sets: &[HybridZonotope<T>],
    gc_blocks: Vec<SparseMatrix<T>>,
    ac_blocks: Vec<SparseMatrix<T>>,
    ab_blocks: Vec<SparseMatrix<T>>,
) -> Result<HybridZonotope<T>> {
    let gb_blocks: Vec<SparseMatrix<T>> =
        sets.iter().map(|z| SparseMatrix::hstack(&[z.gb(), &SparseMatrix::column(z.c())])).collect::<Result<_>>()?;
    let gc = SparseMatrix::hstack(&gc_blocks.iter().collect::<Vec<_>>())?;
    let gb = SparseMatrix::hstack(&gb_blocks.iter().collect::<Vec<_>>())?;
    let ac_body = SparseMatrix::block_diag(&ac_blocks.iter().collect::<Vec<_>>());
    let ab_body = SparseMatrix::block_diag(&ab_blocks.iter().collect::<Vec<_>>());
    let ac = SparseMatrix::vstack(&[&ac_body, &SparseMatrix::zeros(1, ac_body.cols())])?;
    let ab = SparseMatrix::vstack(&[&ab_body, &indicator_row(sets)])?;
    let mut b = vec![T::zero(); ac.rows()];
    *b.last_mut().expect("choose-one row") = T::one();
    HybridZonotope::new(gc, gb, vec![T::zero(); n], ac, ab, b, Form::ZeroOne)
}

/// Sharp union: its convex relaxation is the convex hull of the union.
pub fn union_sharp<T: Real>(sets: &[HybridZonotope<T>]) -> Result<HybridZonotope<T>> {
    let n = check_collection(sets)?;
    let mut gc_blocks = Vec::new();
    let mut ac_blocks = Vec::new();
    let mut ab_blocks = Vec::new();
    for z in sets {
        let (ngc, ngb, ng, nc) = (z.n_gc(), z.n_gb(), z.n_g(), z.n_c());
        gc_blocks.push(SparseMatrix::hstack(&[z.gc(), &SparseMatrix::zeros(n, ng)])?);
        // [[Ac, 0], [[I; 0], I]]
        let ic = SparseMatrix::vstack(&[&SparseMatrix::identity(ngc), &SparseMatrix::zeros(ngb, ngc)])?;
        ac_blocks.push(SparseMatrix::vstack(&[
            &SparseMatrix::hstack(&[z.ac(), &SparseMatrix::zeros(nc, ng)])?,
            &SparseMatrix::hstack(&[&ic, &SparseMatrix::identity(ng)])?,
        ])?);
        // [[Ab, −b], [[0; I], −1]]
        let ib = SparseMatrix::vstack(&[&SparseMatrix::zeros(ngc, ngb), &SparseMatrix::identity(ngb)])?;
        ab_blocks.push(SparseMatrix::vstack(&[
            &SparseMatrix::hstack(&[z.ab(), &SparseMatrix::column(z.b()).scale(-T::one())])?,
            &SparseMatrix::hstack(&[&ib, &ones_col::<T>(ng).scale(-T::one())])?,
        ])?);
    }
    union_from_blocks(n, sets, gc_blocks, ac_blocks, ab_blocks)
}

/// Condensed union: one slack factor and one aggregate row per constituent.
pub fn union_condensed<T: Real>(sets: &[HybridZonotope<T>]) -> Result<HybridZonotope<T>> {
    let n = check_collection(sets)?;
    let mut gc_blocks = Vec::new();
    let mut ac_blocks = Vec::new();
    let mut ab_blocks = Vec::new();
    for z in sets {
        let (ngc, ngb, nc) = (z.n_gc(), z.n_gb(), z.n_c());
        let ng = T::count(z.n_g());
        gc_blocks.push(SparseMatrix::hstack(&[z.gc(), &SparseMatrix::zeros(n, 1)])?);
        // [[1ᵀ, n_G], [Ac, 0]]
        let mut top_c = vec![T::one(); ngc];
        top_c.push(ng);
        ac_blocks.push(SparseMatrix::vstack(&[
            &SparseMatrix::row(&top_c),
            &SparseMatrix::hstack(&[z.ac(), &SparseMatrix::zeros(nc, 1)])?,
        ])?);
        // [[1ᵀ, −n_G], [Ab, −b]]
        let mut top_b = vec![T::one(); ngb];
        top_b.push(-ng);
        ab_blocks.push(SparseMatrix::vstack(&[
            &SparseMatrix::row(&top_b),
            &SparseMatrix::hstack(&[z.ab(), &SparseMatrix::column(z.b()).scale(-T::one())])?,
        ])?);
    }
    union_from_blocks(n, sets, gc_blocks, ac_blocks, ab_blocks)
}

/// Matches generator columns across zonotopes. Two columns are shared when
/// every entry differs by at most `tol`; repeated columns within one
/// constituent map to distinct shared columns.
pub fn incidence<T: Real>(sets: &[HybridZonotope<T>], tol: T) -> Result<IncidenceMatrix<T>> {
    let n = check_collection(sets)?;
    let mut shared: Vec<Vec<T>> = Vec::new();
    let mut columns = Vec::with_capacity(sets.len());
    for z in sets {
        let mut used = vec![false; shared.len()];
        let mut cols = Vec::with_capacity(z.n_gc());
        for j in 0..z.n_gc() {
            let mut g = vec![T::zero(); n];
            for (r, v) in z.gc().col_iter(j) {
                g[r] = v;
            }
            let found = (0..shared.len()).find(|&k| !used[k] && shared[k].iter().zip(&g).all(|(&a, &b)| (a - b).abs() <= tol));
            let k = found.unwrap_or_else(|| {
                shared.push(g);
                used.push(false);
                shared.len() - 1
            });
            used[k] = true;
            cols.push(k);
        }
        columns.push(cols);
    }
    let ns = shared.len();
    let g = SparseMatrix::from_triplets_unchecked(
        n,
        ns,
        shared.iter().enumerate().flat_map(|(k, col)| col.iter().enumerate().map(move |(r, &v)| (r, k, v))),
    );
    let mut counts = vec![0usize; ns];
    let mut trip = Vec::new();
    for (i, cols) in columns.iter().enumerate() {
        for &k in cols {
            counts[k] += 1;
            trip.push((k, i, T::one()));
        }
    }
    let m = SparseMatrix::from_triplets_unchecked(ns, sets.len(), trip);
    Ok(IncidenceMatrix { shared: g, m, counts, columns })
}

/// Union of zonotopes over a shared generator matrix; the result is sharp.
///
/// `tol` is the generator matching tolerance (`None` for exact matching).
pub fn union_zonotope<T: Real>(sets: &[HybridZonotope<T>], tol: Option<T>) -> Result<HybridZonotope<T>> {
    let n = check_collection(sets)?;
    if let Some(i) = sets.iter().position(|z| !z.is_zonotope()) {
        return Err(Error::NotAZonotope(i));
    }
    let inc = incidence(sets, tol.unwrap_or_else(T::zero))?;
    let ns = inc.shared.cols();
    let nsets = sets.len();
    let gc = SparseMatrix::hstack(&[&inc.shared, &SparseMatrix::zeros(n, ns)])?;
    let centers: Vec<T> = sets.iter().flat_map(|z| z.c().iter().copied()).collect();
    let gb = SparseMatrix::from_row_major(nsets, n, &centers)?.transpose();
    let counts: Vec<T> = inc.counts.iter().map(|&c| T::count(c)).collect();
    let ac = SparseMatrix::vstack(&[
        &SparseMatrix::hstack(&[&SparseMatrix::identity(ns), &SparseMatrix::from_diag(&counts)])?,
        &SparseMatrix::zeros(1, 2 * ns),
    ])?;
    let ab = SparseMatrix::vstack(&[&inc.m.scale(-T::one()), &SparseMatrix::row(&vec![T::one(); nsets])])?;
    let mut b = vec![T::zero(); ns + 1];
    b[ns] = T::one();
    HybridZonotope::new(gc, gb, vec![T::zero(); n], ac, ab, b, Form::ZeroOne)
}

/// Dispatches to the selected identity.
pub fn union<T: Real>(sets: &[HybridZonotope<T>], kind: UnionKind) -> Result<HybridZonotope<T>> {
    match kind {
        UnionKind::Sharp => union_sharp(sets),
        UnionKind::Condensed => union_condensed(sets),
        UnionKind::Zonotope => union_zonotope(sets, None),
    }
}

/// Factor vector of a union output that reproduces the point of constituent
/// `i` at its factor vector `xi`.
pub fn lift_witness<T: Real>(sets: &[HybridZonotope<T>], kind: UnionKind, i: usize, xi: &[T]) -> Result<Vec<T>> {
    if i >= sets.len() || xi.len() != sets[i].n_g() {
        return dim_err("witness does not match the selected constituent");
    }
    if kind == UnionKind::Zonotope {
        let inc = incidence(sets, T::zero())?;
        let ns = inc.shared.cols();
        let mut w = vec![T::zero(); 2 * ns + sets.len()];
        for (j, &k) in inc.columns[i].iter().enumerate() {
            w[k] = xi[j];
            w[ns + k] = (T::one() - xi[j]) / T::count(inc.counts[k]);
        }
        w[2 * ns + i] = T::one();
        return Ok(w);
    }
    let mut cont = Vec::new();
    let mut bin = Vec::new();
    for (k, z) in sets.iter().enumerate() {
        let (ngc, ngb) = (z.n_gc(), z.n_gb());
        if k != i {
            let slack = if kind == UnionKind::Sharp { z.n_g() } else { 1 };
            cont.extend(std::iter::repeat_n(T::zero(), ngc + slack));
            bin.extend(std::iter::repeat_n(T::zero(), ngb + 1));
            continue;
        }
        let (xc, xb) = xi.split_at(ngc);
        cont.extend_from_slice(xc);
        if kind == UnionKind::Sharp {
            cont.extend(xi.iter().map(|&v| T::one() - v));
        } else if z.n_g() == 0 {
            cont.push(T::zero());
        } else {
            let total: T = xi.iter().copied().sum();
            cont.push(T::one() - total / T::count(z.n_g()));
        }
        bin.extend_from_slice(xb);
        bin.push(T::one());
    }
    cont.extend(bin);
    Ok(cont)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{complexity, contains_point};

    fn unit_box01(x: f64, y: f64) -> HybridZonotope<f64> {
        HybridZonotope::from_box(&[x, y], &[x + 1.0, y + 1.0], Form::ZeroOne).unwrap()
    }

    #[test]
    fn complexity_of_two_boxes() {
        let sets = [unit_box01(0.0, 0.0), unit_box01(3.0, 0.0)];
        let s = complexity(&union_sharp(&sets).unwrap());
        assert_eq!((s.n_gc, s.n_gb, s.n_c), (8, 2, 5));
        let c = complexity(&union_condensed(&sets).unwrap());
        assert_eq!((c.n_gc, c.n_gb, c.n_c), (6, 2, 3));
    }

    #[test]
    fn lifted_witnesses_are_members() {
        let sets = [unit_box01(0.0, 0.0), unit_box01(3.0, 0.0)];
        for kind in [UnionKind::Sharp, UnionKind::Condensed, UnionKind::Zonotope] {
            let u = union(&sets, kind).unwrap();
            for i in 0..2 {
                let xi = [0.25, 0.75];
                let w = lift_witness(&sets, kind, i, &xi).unwrap();
                assert!(u.is_witness(&w, 1e-12), "{kind:?}");
                assert_eq!(u.point_at(&w), sets[i].point_at(&xi));
            }
            assert!(!contains_point(&u, &[2.0, 0.5], 1e-9).unwrap());
        }
    }

    #[test]
    fn grid_of_cells_shares_generators() {
        let cells: Vec<_> = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)].iter().map(|&(x, y)| unit_box01(x, y)).collect();
        let u = union_zonotope(&cells, None).unwrap();
        let k = complexity(&u);
        assert_eq!((k.n_gc, k.n_gb, k.n_c), (4, 4, 3));
        for z in &cells {
            let center: Vec<f64> = z.c().iter().map(|v| v + 0.5).collect();
            assert!(contains_point(&u, &center, 1e-9).unwrap());
        }
    }

    #[test]
    fn single_zonotope_union() {
        let z = unit_box01(0.0, 0.0);
        let u = union_zonotope(std::slice::from_ref(&z), None).unwrap();
        assert!(contains_point(&u, &[0.5, 0.5], 1e-9).unwrap());
        assert!(!contains_point(&u, &[1.5, 0.5], 1e-9).unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(union_sharp::<f64>(&[]), Err(Error::EmptyUnion));
        let canonical = HybridZonotope::<f64>::point(vec![0.0], Form::Canonical);
        assert_eq!(union_condensed(&[canonical]), Err(Error::FormMismatch));
        let a = unit_box01(0.0, 0.0);
        let b = HybridZonotope::from_box(&[0.0], &[1.0], Form::ZeroOne).unwrap();
        assert!(matches!(union_sharp(&[a.clone(), b]), Err(Error::DimensionMismatch(_))));
        let u = union_sharp(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(union_zonotope(&[a, u], None), Err(Error::NotAZonotope(1)));
    }
}
