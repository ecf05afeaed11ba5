//! Sparse complex matrices in compressed-row form.
//!
//! Every operator in the crate (ladder operators, Hamiltonians, generators)
//! is assembled from coordinate triples and then compressed. Duplicate
//! triples are summed in insertion order and exact zeros are dropped, so the
//! sparsity pattern is the structural coupling pattern.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_triples(
            n,
            n,
            entries
                .iter()
                .enumerate()
                .map(|(i, &d)| (i, i, Complex64::new(d, 0.0))),
        )
    }

    /// Builds a matrix from `(row, col, value)` triples.
    ///
    /// Panics if an index is out of bounds.
    pub fn from_triples<I>(nrows: usize, ncols: usize, triples: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut t: Vec<(usize, usize, Complex64)> = triples.into_iter().collect();
        for &(r, c, _) in &t {
            assert!(r < nrows && c < ncols, "triple ({r}, {c}) outside {nrows}x{ncols}");
        }
        // stable: duplicates are summed in insertion order
        t.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(t.len());
        let mut i = 0;
        while i < t.len() {
            let (r, c, mut v) = t[i];
            i += 1;
            while i < t.len() && t[i].0 == r && t[i].1 == c {
                v += t[i].2;
                i += 1;
            }
            if v.re != 0.0 || v.im != 0.0 {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Nonzero entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All nonzero entries in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triples(
            self.ncols,
            self.nrows,
            self.triples().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_triples(
            self.nrows,
            self.ncols,
            self.triples().map(|(r, c, v)| (r, c, s * v)),
        )
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Entry-wise `self + other`.
    pub fn add(&self, other: &SparseMatrix) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triples(self.nrows, self.ncols, self.triples().chain(other.triples()))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triples(
            self.nrows,
            self.ncols,
            self.triples()
                .chain(other.triples().map(|(r, c, v)| (r, c, -v))),
        )
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut t = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Self::from_triples(self.nrows, other.ncols, t)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &SparseMatrix) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product; the index of `self` is the slow one.
    pub fn kron(&self, other: &SparseMatrix) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triples() {
            for (r2, c2, v2) in other.triples() {
                t.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::from_triples(self.nrows * other.nrows, self.ncols * other.ncols, t)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triples() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                t.push((r, c, m[(r, c)]));
            }
        }
        Self::from_triples(m.nrows(), m.ncols(), t)
    }

    /// Largest entry modulus, 0 for the empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus restricted to the given rows.
    pub fn max_abs_in_rows(&self, rows: &[usize]) -> f64 {
        rows.iter()
            .flat_map(|&r| self.row(r))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_rc − conj(A_cr)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.triples()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }
}

/// A sparse matrix that equals its conjugate transpose exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(SparseMatrix);

impl HermitianOperator {
    /// Accepts `m` if `max |m_rc − conj(m_cr)| ≤ tol`, then symmetrizes it.
    pub fn try_new(m: SparseMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let residual = m.hermiticity_residual();
        if residual > tol {
            return Err(Error::NonHermitian { residual });
        }
        if residual == 0.0 {
            return Ok(HermitianOperator(m));
        }
        let sym = m.add(&m.adjoint()).scale_re(0.5);
        Ok(HermitianOperator(sym))
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        HermitianOperator(SparseMatrix::diagonal(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_sparse(&self) -> &SparseMatrix {
        &self.0
    }

    pub fn into_sparse(self) -> SparseMatrix {
        self.0
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(self.0.add(&other.0))
    }

    pub fn scale_re(&self, s: f64) -> HermitianOperator {
        HermitianOperator(self.0.scale_re(s))
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(self.0.kron(&other.0))
    }

    /// Real diagonal of the operator.
    pub fn diagonal_re(&self) -> Vec<f64> {
        self.0.diagonal_entries().iter().map(|z| z.re).collect()
    }
}

impl Deref for HermitianOperator {
    type Target = SparseMatrix;
    fn deref(&self) -> &SparseMatrix {
        &self.0
    }
}

/// Assembles a Hermitian operator term by term; every off-diagonal entry is
/// written together with its conjugate partner.
#[derive(Clone, Debug)]
pub struct HermitianBuilder {
    dim: usize,
    triples: Vec<(usize, usize, Complex64)>,
}

impl HermitianBuilder {
    pub fn new(dim: usize) -> Self {
        HermitianBuilder {
            dim,
            triples: Vec::new(),
        }
    }

    pub fn add_diagonal(&mut self, i: usize, value: f64) {
        self.triples.push((i, i, Complex64::new(value, 0.0)));
    }

    /// Adds `value` at `(row, col)` and `conj(value)` at `(col, row)`.
    pub fn add_pair(&mut self, row: usize, col: usize, value: Complex64) {
        if row == col {
            self.add_diagonal(row, value.re);
            return;
        }
        self.triples.push((row, col, value));
        self.triples.push((col, row, value.conj()));
    }

    pub fn build(self) -> HermitianOperator {
        HermitianOperator(SparseMatrix::from_triples(self.dim, self.dim, self.triples))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = SparseMatrix::from_triples(
            2,
            2,
            [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 1.0)), (1, 0, c(1.0, 0.0)), (1, 0, c(-1.0, 0.0))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn product_and_commutator_of_pauli_matrices() {
        let sx = SparseMatrix::from_triples(2, 2, [(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
        let sy = SparseMatrix::from_triples(2, 2, [(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))]);
        let sz = SparseMatrix::diagonal(&[1.0, -1.0]);
        // [σx, σy] = 2iσz
        let comm = sx.commutator(&sy);
        assert_eq!(comm, sz.scale(c(0.0, 2.0)));
        assert_eq!(sx.mul(&sx), SparseMatrix::identity(2));
    }

    #[test]
    fn kron_ordering() {
        let a = SparseMatrix::diagonal(&[1.0, 2.0]);
        let b = SparseMatrix::from_triples(2, 2, [(0, 1, c(1.0, 0.0))]);
        let k = a.kron(&b);
        assert_eq!(k.get(0, 1), c(1.0, 0.0));
        assert_eq!(k.get(2, 3), c(2.0, 0.0));
        assert_eq!(k.nnz(), 2);
    }

    #[test]
    fn hermitian_builder_is_exactly_hermitian() {
        let mut b = HermitianBuilder::new(3);
        b.add_diagonal(0, 1.0);
        b.add_pair(0, 2, c(0.3, -0.7));
        b.add_pair(1, 2, c(1.0 / 3.0, 2.0f64.sqrt()));
        let h = b.build();
        assert_eq!(h.hermiticity_residual(), 0.0);
        assert_eq!(h.get(2, 0), c(0.3, 0.7));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = SparseMatrix::from_triples(2, 2, [(0, 1, c(1.0, 0.0))]);
        assert!(matches!(
            HermitianOperator::try_new(m, 1e-12),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn matvec_matches_dense() {
        let m = SparseMatrix::from_triples(
            2,
            3,
            [(0, 0, c(1.0, 1.0)), (0, 2, c(2.0, 0.0)), (1, 1, c(0.0, -1.0))],
        );
        let x = [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)];
        let y = m.matvec(&x);
        let d = m.to_dense() * nalgebra::DVector::from_column_slice(&x);
        assert_eq!(y[0], d[0]);
        assert_eq!(y[1], d[1]);
    }
}
