use crate::error::{dim_err, Result};
use crate::scalar::{prune_threshold, Real};

/// Compressed sparse column matrix.
///
/// Row indices are sorted within each column, duplicates are summed on
/// construction and entries with magnitude below the prune threshold are
/// dropped, so `nnz` always counts meaningful entries only.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, colptr: vec![0; cols + 1], rowidx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![T::one(); n])
    }

    pub fn from_diag(d: &[T]) -> Self {
        let n = d.len();
        let trip = d.iter().enumerate().map(|(i, &v)| (i, i, v));
        Self::from_triplets_unchecked(n, n, trip)
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let trip: Vec<_> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = trip.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return dim_err(format!("triplet ({r}, {c}) outside a {rows}x{cols} matrix"));
        }
        Ok(Self::from_triplets_unchecked(rows, cols, trip))
    }

    pub(crate) fn from_triplets_unchecked<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut trip: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        trip.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        let mut colptr = vec![0; cols + 1];
        let mut rowidx = Vec::with_capacity(trip.len());
        let mut values = Vec::with_capacity(trip.len());
        let tol = prune_threshold::<T>();
        let mut i = 0;
        while i < trip.len() {
            let (r, c, mut v) = trip[i];
            i += 1;
            while i < trip.len() && trip[i].0 == r && trip[i].1 == c {
                v += trip[i].2;
                i += 1;
            }
            if v.abs() >= tol {
                rowidx.push(r);
                values.push(v);
                colptr[c + 1] += 1;
            }
        }
        for c in 0..cols {
            colptr[c + 1] += colptr[c];
        }
        Self { rows, cols, colptr, rowidx, values }
    }

    /// Builds a matrix from a row-major dense array.
    pub fn from_row_major(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        if data.len() != rows * cols {
            return dim_err(format!("{} values for a {rows}x{cols} matrix", data.len()));
        }
        let trip = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| (r, c, data[r * cols + c]));
        Ok(Self::from_triplets_unchecked(rows, cols, trip))
    }

    /// Builds a matrix from dense rows of equal length.
    pub fn from_dense(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return dim_err("ragged dense rows");
        }
        let flat: Vec<T> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), cols, &flat)
    }

    /// A single column built from a dense vector.
    pub fn column(v: &[T]) -> Self {
        Self::from_triplets_unchecked(v.len(), 1, v.iter().enumerate().map(|(i, &x)| (i, 0, x)))
    }

    /// A single row built from a dense vector.
    pub fn row(v: &[T]) -> Self {
        Self::from_triplets_unchecked(1, v.len(), v.iter().enumerate().map(|(i, &x)| (0, i, x)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowidx(&self) -> &[usize] {
        &self.rowidx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> T {
        let (lo, hi) = (self.colptr[c], self.colptr[c + 1]);
        match self.rowidx[lo..hi].binary_search(&r) {
            Ok(k) => self.values[lo + k],
            Err(_) => T::zero(),
        }
    }

    /// Stored entries of column `c` as `(row, value)`.
    pub fn col_iter(&self, c: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (lo, hi) = (self.colptr[c], self.colptr[c + 1]);
        self.rowidx[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    /// All stored entries as `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.cols).flat_map(move |c| self.col_iter(c).map(move |(r, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets_unchecked(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_triplets_unchecked(self.rows, self.cols, self.triplets().map(|(r, c, v)| (r, c, v * s)))
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "mul_vec: vector length");
        let mut y = vec![T::zero(); self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc != T::zero() {
                for (r, v) in self.col_iter(c) {
                    y[r] += v * xc;
                }
            }
        }
        y
    }

    /// `y = Aᵀ x`.
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows, "tr_mul_vec: vector length");
        (0..self.cols).map(|c| self.col_iter(c).map(|(r, v)| v * x[r]).sum()).collect()
    }

    /// Sparse product `A B`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return dim_err(format!("product of {:?} and {:?}", self.shape(), other.shape()));
        }
        let mut work = vec![T::zero(); self.rows];
        let mut mark = vec![usize::MAX; self.rows];
        let mut touched = Vec::new();
        let mut trip = Vec::new();
        for j in 0..other.cols {
            touched.clear();
            for (k, bkj) in other.col_iter(j) {
                for (i, aik) in self.col_iter(k) {
                    if mark[i] != j {
                        mark[i] = j;
                        work[i] = T::zero();
                        touched.push(i);
                    }
                    work[i] += aik * bkj;
                }
            }
            trip.extend(touched.iter().map(|&i| (i, j, work[i])));
        }
        Ok(Self::from_triplets_unchecked(self.rows, other.cols, trip))
    }

    /// Entrywise sum `A + B`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return dim_err(format!("sum of {:?} and {:?}", self.shape(), other.shape()));
        }
        Ok(Self::from_triplets_unchecked(self.rows, self.cols, self.triplets().chain(other.triplets())))
    }

    /// Horizontal concatenation `[A B ...]`.
    pub fn hstack(blocks: &[&Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return dim_err("hstack blocks have different row counts");
        }
        let mut trip = Vec::new();
        let mut off = 0;
        for b in blocks {
            trip.extend(b.triplets().map(|(r, c, v)| (r, c + off, v)));
            off += b.cols;
        }
        Ok(Self::from_triplets_unchecked(rows, off, trip))
    }

    /// Vertical concatenation `[A; B; ...]`.
    pub fn vstack(blocks: &[&Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return dim_err("vstack blocks have different column counts");
        }
        let mut trip = Vec::new();
        let mut off = 0;
        for b in blocks {
            trip.extend(b.triplets().map(|(r, c, v)| (r + off, c, v)));
            off += b.rows;
        }
        Ok(Self::from_triplets_unchecked(off, cols, trip))
    }

    /// Block-diagonal matrix with the given blocks.
    pub fn block_diag(blocks: &[&Self]) -> Self {
        let mut trip = Vec::new();
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            trip.extend(b.triplets().map(|(r, c, v)| (r + ro, c + co, v)));
            ro += b.rows;
            co += b.cols;
        }
        Self::from_triplets_unchecked(ro, co, trip)
    }

    /// Copy of the listed rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.rows];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let trip = self.triplets().filter(|&(r, _, _)| map[r] != usize::MAX).map(|(r, c, v)| (map[r], c, v));
        Self::from_triplets_unchecked(keep.len(), self.cols, trip)
    }

    /// Copy of columns `start..end`.
    pub fn select_cols(&self, start: usize, end: usize) -> Self {
        let trip = (start..end).flat_map(|c| self.col_iter(c).map(move |(r, v)| (r, c - start, v)));
        Self::from_triplets_unchecked(self.rows, end - start, trip)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// True when the matrix is square and `|A_ij − A_ji| ≤ tol` everywhere.
    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols && self.triplets().all(|(r, c, v)| (v - self.get(c, r)).abs() <= tol)
    }

    /// Converts the scalar type of every stored entry.
    pub fn cast<U: Real>(&self) -> SparseMatrix<U> {
        SparseMatrix::from_triplets_unchecked(
            self.rows,
            self.cols,
            self.triplets().map(|(r, c, v)| (r, c, U::from_f64(v.as_f64()).unwrap_or_else(U::nan))),
        )
    }
}
