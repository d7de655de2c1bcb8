//! Zonotopes, constrained zonotopes and hybrid zonotopes.

mod membership;
mod ops;

pub use membership::{contains_point, find_witness, support_convex_relaxation, MAX_ENUMERATED_BINARIES};
pub use ops::{
    affine_map, cartesian_product, complexity, convert_form, convex_relaxation, generalized_intersection,
    interval_hull, minkowski_sum, regular_polygon_zonotope,
};

use std::fmt;

use crate::error::{dim_err, Result};
use crate::kernel::SparseMatrix;
use crate::scalar::{norm_inf, Real};

/// Factor box convention of a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    /// Continuous factors in `[-1, 1]`, binary factors in `{-1, 1}`.
    Canonical,
    /// Continuous factors in `[0, 1]`, binary factors in `{0, 1}`.
    ZeroOne,
}

impl Form {
    pub fn lower<T: Real>(self) -> T {
        match self {
            Form::Canonical => -T::one(),
            Form::ZeroOne => T::zero(),
        }
    }

    pub fn upper<T: Real>(self) -> T {
        T::one()
    }
}

/// Memory complexity of a set as reported in the reachability tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SetComplexity {
    pub n: usize,
    pub n_gc: usize,
    pub n_gb: usize,
    pub n_c: usize,
    pub nnz_g: usize,
    pub nnz_a: usize,
}

impl SetComplexity {
    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize, usize) {
        (self.n, self.n_gc, self.n_gb, self.n_c, self.nnz_g, self.nnz_a)
    }
}

impl fmt::Display for SetComplexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} n_Gc={} n_Gb={} n_C={} nnz(G)={} nnz(A)={}",
            self.n, self.n_gc, self.n_gb, self.n_c, self.nnz_g, self.nnz_a
        )
    }
}

/// The set `{ Gc ξc + Gb ξb + c : Ac ξc + Ab ξb = b }` with continuous
/// factors ξc in the form's interval and binary factors ξb at its endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridZonotope<T> {
    gc: SparseMatrix<T>,
    gb: SparseMatrix<T>,
    c: Vec<T>,
    ac: SparseMatrix<T>,
    ab: SparseMatrix<T>,
    b: Vec<T>,
    form: Form,
}

impl<T: Real> HybridZonotope<T> {
    pub fn new(
        gc: SparseMatrix<T>,
        gb: SparseMatrix<T>,
        c: Vec<T>,
        ac: SparseMatrix<T>,
        ab: SparseMatrix<T>,
        b: Vec<T>,
        form: Form,
    ) -> Result<Self> {
        let n = c.len();
        let nc = b.len();
        if gc.rows() != n || gb.rows() != n {
            return dim_err(format!("generators have {} and {} rows for dimension {n}", gc.rows(), gb.rows()));
        }
        if ac.rows() != nc || ab.rows() != nc {
            return dim_err(format!("constraint blocks have {} and {} rows for {nc} constraints", ac.rows(), ab.rows()));
        }
        if ac.cols() != gc.cols() || ab.cols() != gb.cols() {
            return dim_err("constraint columns do not match generator columns");
        }
        Ok(Self { gc, gb, c, ac, ab, b, form })
    }

    /// Zonotope `{ G ξ + c }`.
    pub fn zonotope(g: SparseMatrix<T>, c: Vec<T>, form: Form) -> Result<Self> {
        let (n, ng) = g.shape();
        Self::new(g, SparseMatrix::zeros(n, 0), c, SparseMatrix::zeros(0, ng), SparseMatrix::zeros(0, 0), Vec::new(), form)
    }

    /// Constrained zonotope `{ G ξ + c : A ξ = b }`.
    pub fn constrained_zonotope(g: SparseMatrix<T>, c: Vec<T>, a: SparseMatrix<T>, b: Vec<T>, form: Form) -> Result<Self> {
        let n = g.rows();
        let nc = a.rows();
        Self::new(g, SparseMatrix::zeros(n, 0), c, a, SparseMatrix::zeros(nc, 0), b, form)
    }

    /// The singleton `{c}`.
    pub fn point(c: Vec<T>, form: Form) -> Self {
        let n = c.len();
        Self::zonotope(SparseMatrix::zeros(n, 0), c, form).expect("consistent point")
    }

    /// The zero-dimensional set, neutral for Cartesian products.
    pub fn trivial(form: Form) -> Self {
        Self::point(Vec::new(), form)
    }

    /// Axis-aligned box `[lo, hi]` as a zonotope with one generator per
    /// non-degenerate axis.
    pub fn from_box(lo: &[T], hi: &[T], form: Form) -> Result<Self> {
        if lo.len() != hi.len() {
            return dim_err("box bounds have different lengths");
        }
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] > hi[i]) {
            return Err(crate::Error::InvalidInterval { lo: lo[i].as_f64(), hi: hi[i].as_f64() });
        }
        let two = T::lit(2.0);
        let axes: Vec<usize> = (0..lo.len()).filter(|&i| hi[i] > lo[i]).collect();
        let (trip, c): (Vec<_>, Vec<T>) = match form {
            Form::Canonical => (
                axes.iter().enumerate().map(|(k, &i)| (i, k, (hi[i] - lo[i]) / two)).collect(),
                lo.iter().zip(hi).map(|(&l, &h)| (l + h) / two).collect(),
            ),
            Form::ZeroOne => (axes.iter().enumerate().map(|(k, &i)| (i, k, hi[i] - lo[i])).collect(), lo.to_vec()),
        };
        Self::zonotope(SparseMatrix::from_triplets(lo.len(), axes.len(), trip)?, c, form)
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn n_gc(&self) -> usize {
        self.gc.cols()
    }

    pub fn n_gb(&self) -> usize {
        self.gb.cols()
    }

    pub fn n_g(&self) -> usize {
        self.n_gc() + self.n_gb()
    }

    pub fn n_c(&self) -> usize {
        self.b.len()
    }

    pub fn gc(&self) -> &SparseMatrix<T> {
        &self.gc
    }

    pub fn gb(&self) -> &SparseMatrix<T> {
        &self.gb
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn ac(&self) -> &SparseMatrix<T> {
        &self.ac
    }

    pub fn ab(&self) -> &SparseMatrix<T> {
        &self.ab
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn is_zonotope(&self) -> bool {
        self.n_gb() == 0 && self.n_c() == 0
    }

    pub fn is_constrained_zonotope(&self) -> bool {
        self.n_gb() == 0
    }

    /// `G = [Gc Gb]`.
    pub fn generators(&self) -> SparseMatrix<T> {
        SparseMatrix::hstack(&[&self.gc, &self.gb]).expect("generator blocks share rows")
    }

    /// `A = [Ac Ab]`.
    pub fn constraints(&self) -> SparseMatrix<T> {
        SparseMatrix::hstack(&[&self.ac, &self.ab]).expect("constraint blocks share rows")
    }

    /// Image `G ξ + c` of a stacked factor vector `ξ = (ξc, ξb)`.
    pub fn point_at(&self, xi: &[T]) -> Vec<T> {
        assert_eq!(xi.len(), self.n_g(), "factor vector length");
        let mut x = self.gc.mul_vec(&xi[..self.n_gc()]);
        for (xi_, v) in x.iter_mut().zip(self.gb.mul_vec(&xi[self.n_gc()..])) {
            *xi_ += v;
        }
        for (xi_, &ci) in x.iter_mut().zip(&self.c) {
            *xi_ += ci;
        }
        x
    }

    /// `‖A ξ − b‖∞` for a stacked factor vector.
    pub fn constraint_residual(&self, xi: &[T]) -> T {
        let mut r = self.ac.mul_vec(&xi[..self.n_gc()]);
        for ((ri, v), &bi) in r.iter_mut().zip(self.ab.mul_vec(&xi[self.n_gc()..])).zip(&self.b) {
            *ri += v - bi;
        }
        norm_inf(&r)
    }

    /// True when `ξ` lies in the mixed-integer factor box up to `tol`.
    pub fn factors_admissible(&self, xi: &[T], tol: T) -> bool {
        let (lo, hi) = (self.form.lower::<T>(), self.form.upper::<T>());
        let (cont, bin) = xi.split_at(self.n_gc());
        cont.iter().all(|&v| v >= lo - tol && v <= hi + tol)
            && bin.iter().all(|&v| (v - lo).abs() <= tol || (v - hi).abs() <= tol)
    }

    /// True when `ξ` is an admissible factor vector satisfying the constraints.
    pub fn is_witness(&self, xi: &[T], tol: T) -> bool {
        xi.len() == self.n_g() && self.factors_admissible(xi, tol) && self.constraint_residual(xi) <= tol
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> HybridZonotope<U> {
        let v = |x: &[T]| x.iter().map(|&a| U::lit(a.as_f64())).collect();
        HybridZonotope {
            gc: self.gc.cast(),
            gb: self.gb.cast(),
            c: v(&self.c),
            ac: self.ac.cast(),
            ab: self.ab.cast(),
            b: v(&self.b),
            form: self.form,
        }
    }
}
