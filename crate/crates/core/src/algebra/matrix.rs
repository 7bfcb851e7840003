//! Sparse complex matrices over finite-dimensional Hilbert spaces.
//!
//! Operators are assembled in compressed-row form (Kronecker products of
//! ladder and Chevalley generators are extremely sparse) and densified into
//! `nalgebra` matrices only when a decomposition is needed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Complex matrix stored in compressed sparse row form.
///
/// Column indices within a row are strictly increasing and no stored value
/// is exactly zero, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![ONE; dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &v)| (i, i, v));
        Self::from_triplets_unchecked(diag.len(), diag.len(), triplets)
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let triplets: Vec<_> = triplets.into_iter().collect();
        for &(r, c, v) in &triplets {
            if r >= rows {
                return Err(Error::DimensionMismatch { expected: rows, actual: r + 1 });
            }
            if c >= cols {
                return Err(Error::DimensionMismatch { expected: cols, actual: c + 1 });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
        Ok(Self::from_triplets_unchecked(rows, cols, triplets))
    }

    pub(crate) fn from_triplets_unchecked<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut triplets: Vec<_> = triplets.into_iter().collect();
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let m = Self { rows, cols, row_ptr, col_idx, values };
        m.pruned()
    }

    /// Dense row-major input, mostly for tests and small literals.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch { expected: ncols, actual: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                triplets.push((i, j, v));
            }
        }
        Self::from_triplets(nrows, ncols, triplets)
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                triplets.push((i, j, m[(i, j)]));
            }
        }
        Self::from_triplets_unchecked(m.nrows(), m.ncols(), triplets)
    }

    fn pruned(mut self) -> Self {
        let mut new_ptr = vec![0usize; self.rows + 1];
        let mut write = 0;
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != ZERO {
                    self.col_idx[write] = self.col_idx[k];
                    self.values[write] = self.values[k];
                    write += 1;
                }
            }
            new_ptr[r + 1] = write;
        }
        self.col_idx.truncate(write);
        self.values.truncate(write);
        self.row_ptr = new_ptr;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// Iterates stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let triplets = self.triplets().map(|(r, c, v)| (c, r, v.conj()));
        Self::from_triplets_unchecked(self.cols, self.rows, triplets)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.pruned()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let triplets = self.triplets().chain(other.triplets());
        Ok(Self::from_triplets_unchecked(self.rows, self.cols, triplets))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let triplets = self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, -v)));
        Ok(Self::from_triplets_unchecked(self.rows, self.cols, triplets))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, actual: other.rows });
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: other.cols });
        }
        Ok(())
    }

    /// Sparse product (Gustavson row-by-row accumulation).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: other.rows });
        }
        let mut acc = vec![ZERO; other.cols];
        let mut touched = vec![false; other.cols];
        let mut pattern = Vec::new();
        let mut row_ptr = vec![0usize; self.rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.values[k];
                let mid = self.col_idx[k];
                for kk in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.col_idx[kk];
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * other.values[kk];
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                col_idx.push(c);
                values.push(acc[c]);
                acc[c] = ZERO;
                touched[c] = false;
            }
            pattern.clear();
            row_ptr[r + 1] = col_idx.len();
        }
        Ok(Self { rows: self.rows, cols: other.cols, row_ptr, col_idx, values }.pruned())
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the most significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                triplets.push((r1 * other.rows + r2, c1 * other.cols + c2, v1 * v2));
            }
        }
        Self::from_triplets_unchecked(rows, cols, triplets)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: x.len() });
        }
        Ok(self.mul_vec_unchecked(x))
    }

    pub(crate) fn mul_vec_unchecked(&self, x: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    pub fn mul_dvec(&self, x: &DVector<C64>) -> Result<DVector<C64>> {
        Ok(DVector::from_vec(self.mul_vec(x.as_slice())?))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude (0 for the empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `A - A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint()).map(|d| d.frobenius_norm()).unwrap_or(f64::INFINITY)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Outer product `|a⟩⟨b|` as a dense matrix.
pub fn outer(a: &DVector<C64>, b: &DVector<C64>) -> DMatrix<C64> {
    a * b.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(1.0), C64::new(0.0, 2.0), ZERO],
            vec![ZERO, c(-3.0), C64::new(1.0, 1.0)],
        ])
        .unwrap()
    }

    #[test]
    fn dense_roundtrip_and_get() {
        let m = sample();
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(0, 1), C64::new(0.0, 2.0));
        assert_eq!(m.get(1, 0), ZERO);
        assert_eq!(ComplexMatrix::from_dense(&m.to_dense()), m);
    }

    #[test]
    fn adjoint_is_involution() {
        let m = sample();
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint().get(1, 0), C64::new(0.0, -2.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let a = sample();
        let b = a.adjoint();
        let sparse = a.matmul(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).norm() < 1e-14);
    }

    #[test]
    fn shape_errors() {
        let a = sample();
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch { .. })));
        assert!(a.add(&a.adjoint()).is_err());
        assert!(a.mul_vec(&[ONE; 2]).is_err());
    }

    #[test]
    fn rejects_non_finite_and_out_of_range() {
        let bad = ComplexMatrix::from_triplets(2, 2, [(0, 1, C64::new(f64::NAN, 0.0))]);
        assert_eq!(bad, Err(Error::NonFinite { row: 0, col: 1 }));
        assert!(ComplexMatrix::from_triplets(2, 2, [(2, 0, ONE)]).is_err());
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0), c(2.0)], vec![c(3.0), C64::new(0.0, 4.0)]]).unwrap();
        assert_eq!(a.commutator(&a).unwrap().nnz(), 0);
    }

    #[test]
    fn kron_ordering() {
        // |1⟩ ⊗ |0⟩ projector lands on index 2 of the 4-dim space
        let p1 = ComplexMatrix::diagonal(&[ZERO, ONE]);
        let p0 = ComplexMatrix::diagonal(&[ONE, ZERO]);
        let k = p1.kron(&p0);
        assert_eq!(k.nnz(), 1);
        assert_eq!(k.get(2, 2), ONE);
    }

    #[test]
    fn duplicates_sum_and_cancel() {
        let m = ComplexMatrix::from_triplets(1, 1, [(0, 0, ONE), (0, 0, -ONE)]).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m, ComplexMatrix::zeros(1, 1));
    }
}
