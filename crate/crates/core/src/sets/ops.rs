use crate::error::{dim_err, Error, Result};
use crate::kernel::SparseMatrix;
use crate::scalar::Real;
use crate::sets::{Form, HybridZonotope, SetComplexity};

fn same_form<T: Real>(a: &HybridZonotope<T>, b: &HybridZonotope<T>) -> Result<Form> {
    if a.form() != b.form() {
        return Err(Error::FormMismatch);
    }
    Ok(a.form())
}

fn zeros<T: Real>(r: usize, c: usize) -> SparseMatrix<T> {
    SparseMatrix::zeros(r, c)
}

/// `R Z + s`.
pub fn affine_map<T: Real>(r: &SparseMatrix<T>, z: &HybridZonotope<T>, s: &[T]) -> Result<HybridZonotope<T>> {
    if r.cols() != z.dim() || s.len() != r.rows() {
        return dim_err(format!("affine map {:?} with offset {} applied to dimension {}", r.shape(), s.len(), z.dim()));
    }
    let mut c = r.mul_vec(z.c());
    for (ci, &si) in c.iter_mut().zip(s) {
        *ci += si;
    }
    HybridZonotope::new(r.matmul(z.gc())?, r.matmul(z.gb())?, c, z.ac().clone(), z.ab().clone(), z.b().to_vec(), z.form())
}

/// `Z1 ⊕ Z2`.
pub fn minkowski_sum<T: Real>(z1: &HybridZonotope<T>, z2: &HybridZonotope<T>) -> Result<HybridZonotope<T>> {
    if z1.dim() != z2.dim() {
        return dim_err(format!("Minkowski sum of dimensions {} and {}", z1.dim(), z2.dim()));
    }
    let form = same_form(z1, z2)?;
    let c = z1.c().iter().zip(z2.c()).map(|(&a, &b)| a + b).collect();
    let (nc1, nc2) = (z1.n_c(), z2.n_c());
    let ac = SparseMatrix::vstack(&[
        &SparseMatrix::hstack(&[z1.ac(), &zeros(nc1, z2.n_gc())])?,
        &SparseMatrix::hstack(&[&zeros(nc2, z1.n_gc()), z2.ac()])?,
    ])?;
    let ab = SparseMatrix::vstack(&[
        &SparseMatrix::hstack(&[z1.ab(), &zeros(nc1, z2.n_gb())])?,
        &SparseMatrix::hstack(&[&zeros(nc2, z1.n_gb()), z2.ab()])?,
    ])?;
    HybridZonotope::new(
        SparseMatrix::hstack(&[z1.gc(), z2.gc()])?,
        SparseMatrix::hstack(&[z1.gb(), z2.gb()])?,
        c,
        ac,
        ab,
        [z1.b(), z2.b()].concat(),
        form,
    )
}

/// `Z1 × Z2`.
pub fn cartesian_product<T: Real>(z1: &HybridZonotope<T>, z2: &HybridZonotope<T>) -> Result<HybridZonotope<T>> {
    let form = same_form(z1, z2)?;
    HybridZonotope::new(
        SparseMatrix::block_diag(&[z1.gc(), z2.gc()]),
        SparseMatrix::block_diag(&[z1.gb(), z2.gb()]),
        [z1.c(), z2.c()].concat(),
        SparseMatrix::block_diag(&[z1.ac(), z2.ac()]),
        SparseMatrix::block_diag(&[z1.ab(), z2.ab()]),
        [z1.b(), z2.b()].concat(),
        form,
    )
}

/// `Z1 ∩_R Z2 = { x ∈ Z1 : R x ∈ Z2 }`, expressed in the space of `Z1`.
pub fn generalized_intersection<T: Real>(
    z1: &HybridZonotope<T>,
    z2: &HybridZonotope<T>,
    r: &SparseMatrix<T>,
) -> Result<HybridZonotope<T>> {
    if r.rows() != z2.dim() || r.cols() != z1.dim() {
        return dim_err(format!("intersection map {:?} between dimensions {} and {}", r.shape(), z1.dim(), z2.dim()));
    }
    let form = same_form(z1, z2)?;
    let n1 = z1.dim();
    let (nc1, nc2, n2) = (z1.n_c(), z2.n_c(), z2.dim());
    let ac = SparseMatrix::vstack(&[
        &SparseMatrix::hstack(&[z1.ac(), &zeros(nc1, z2.n_gc())])?,
        &SparseMatrix::hstack(&[&zeros(nc2, z1.n_gc()), z2.ac()])?,
        &SparseMatrix::hstack(&[&r.matmul(z1.gc())?, &z2.gc().scale(-T::one())])?,
    ])?;
    let ab = SparseMatrix::vstack(&[
        &SparseMatrix::hstack(&[z1.ab(), &zeros(nc1, z2.n_gb())])?,
        &SparseMatrix::hstack(&[&zeros(nc2, z1.n_gb()), z2.ab()])?,
        &SparseMatrix::hstack(&[&r.matmul(z1.gb())?, &z2.gb().scale(-T::one())])?,
    ])?;
    let rc1 = r.mul_vec(z1.c());
    let mut b = [z1.b(), z2.b()].concat();
    b.extend(z2.c().iter().zip(&rc1).map(|(&c2, &rc)| c2 - rc));
    debug_assert_eq!(b.len(), nc1 + nc2 + n2);
    HybridZonotope::new(
        SparseMatrix::hstack(&[z1.gc(), &zeros(n1, z2.n_gc())])?,
        SparseMatrix::hstack(&[z1.gb(), &zeros(n1, z2.n_gb())])?,
        z1.c().to_vec(),
        ac,
        ab,
        b,
        form,
    )
}

/// Constrained zonotope obtained by letting binary factors range over their interval.
pub fn convex_relaxation<T: Real>(z: &HybridZonotope<T>) -> HybridZonotope<T> {
    HybridZonotope::constrained_zonotope(z.generators(), z.c().to_vec(), z.constraints(), z.b().to_vec(), z.form())
        .expect("relaxation keeps dimensions")
}

/// Re-expresses the set in the other factor convention.
///
/// Canonical factors relate to zero-one factors by `ξ = 2 ξ01 − 1`.
pub fn convert_form<T: Real>(z: &HybridZonotope<T>, target: Form) -> HybridZonotope<T> {
    if z.form() == target {
        return z.clone();
    }
    let two = T::lit(2.0);
    // (scale applied to every matrix, sign of the shift by row sums)
    let (scale, shift) = match target {
        Form::ZeroOne => (two, -T::one()),
        Form::Canonical => (T::one() / two, T::one() / two),
    };
    let row_sum = |m: &SparseMatrix<T>| m.mul_vec(&vec![T::one(); m.cols()]);
    let g = z.generators();
    let a = z.constraints();
    let gsum = row_sum(&g);
    let asum = row_sum(&a);
    let c = z.c().iter().zip(&gsum).map(|(&c, &s)| c + shift * s).collect();
    let b = z.b().iter().zip(&asum).map(|(&b, &s)| b - shift * s).collect();
    HybridZonotope::new(
        z.gc().scale(scale),
        z.gb().scale(scale),
        c,
        z.ac().scale(scale),
        z.ab().scale(scale),
        b,
        target,
    )
    .expect("conversion keeps dimensions")
}

/// Axis-aligned outer bound that ignores the equality constraints.
pub fn interval_hull<T: Real>(z: &HybridZonotope<T>) -> (Vec<T>, Vec<T>) {
    let mut lo = z.c().to_vec();
    let mut hi = z.c().to_vec();
    let g = z.generators();
    for (r, _, v) in g.triplets() {
        match z.form() {
            Form::Canonical => {
                lo[r] -= v.abs();
                hi[r] += v.abs();
            }
            Form::ZeroOne => {
                lo[r] += v.min(T::zero());
                hi[r] += v.max(T::zero());
            }
        }
    }
    (lo, hi)
}

/// Regular `n`-gon of circumradius `r` centred at the origin, as a zonotope
/// with `n/2` generators of length `r sin(π/n)` at angles `(2j+1)π/n`.
pub fn regular_polygon_zonotope<T: Real>(r: T, n: usize, form: Form) -> Result<HybridZonotope<T>> {
    if n % 2 != 0 || n < 4 {
        return Err(Error::InvalidArgument(format!("polygon needs an even side count of at least 4, got {n}")));
    }
    if r <= T::zero() {
        return Err(Error::InvalidArgument("polygon radius must be positive".into()));
    }
    let pi = T::lit(std::f64::consts::PI);
    let nn = T::count(n);
    let len = r * (pi / nn).sin();
    let mut trip = Vec::with_capacity(n);
    for j in 0..n / 2 {
        let th = T::count(2 * j + 1) * pi / nn;
        trip.push((0, j, len * th.cos()));
        trip.push((1, j, len * th.sin()));
    }
    let z = HybridZonotope::zonotope(SparseMatrix::from_triplets(2, n / 2, trip)?, vec![T::zero(); 2], Form::Canonical)?;
    Ok(convert_form(&z, form))
}

/// Dimension counts and nonzeros of `[Gc Gb]` and `[Ac Ab]`.
pub fn complexity<T: Real>(z: &HybridZonotope<T>) -> SetComplexity {
    SetComplexity {
        n: z.dim(),
        n_gc: z.n_gc(),
        n_gb: z.n_gb(),
        n_c: z.n_c(),
        nnz_g: z.gc().nnz() + z.gb().nnz(),
        nnz_a: z.ac().nnz() + z.ab().nnz(),
    }
}
