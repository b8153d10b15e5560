//! Dense complex matrices and the factorizations used by the solvers.
//!
//! Problem sizes here are tiny (at most a few hundred rows), so the matrix
//! type is a plain row-major `Vec<Complex64>` and the factorizations are
//! textbook Jacobi/Cholesky routines. That keeps the crate free of BLAS
//! bindings and bit-for-bit deterministic across runs.

mod eigen;
mod svd;

pub use eigen::{generalized_hermitian_eigen, hermitian_eigen, HermitianEigen};
pub use svd::{svd_right, SvdRight};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Errors raised by the dense factorizations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operand shapes do not conform; the message names the operation.
    ShapeMismatch(String),
    /// Cholesky hit a non-positive pivot; carries the pivot index and value.
    NotPositiveDefinite { pivot: usize, value: f64 },
    /// An iterative factorization failed to converge; carries a condition
    /// estimate of the offending matrix.
    NoConvergence { condition_estimate: f64 },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            LinalgError::NotPositiveDefinite { pivot, value } => {
                write!(f, "matrix not positive definite (pivot {pivot} = {value:.3e})")
            }
            LinalgError::NoConvergence { condition_estimate } => {
                write!(f, "factorization did not converge (cond ~ {condition_estimate:.3e})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LinalgError {}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, data }
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[Complex64]) -> Self {
        CMat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.set(i, j, v[i]);
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(
            self.cols, rhs.rows,
            "mul: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn scale_complex(&self, s: Complex64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Element-wise (Hadamard) product.
    pub fn hadamard(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "hadamard shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a *= *b;
        }
        out
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.get(i, j).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scales every column to unit Euclidean norm. Columns with norm below
    /// `1e-300` are left untouched.
    pub fn normalize_columns(&mut self) {
        for j in 0..self.cols {
            let n = self.col_norm(j);
            if n > 1e-300 {
                let inv = 1.0 / n;
                for i in 0..self.rows {
                    let v = self.get(i, j) * inv;
                    self.set(i, j, v);
                }
            }
        }
    }

    /// Largest absolute difference from the Hermitian transpose.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Orthonormalizes the columns in place with modified Gram–Schmidt.
    /// Columns that become numerically zero are replaced by the next unit
    /// basis vector not yet spanned, so the result always has full column
    /// rank when `cols <= rows`.
    pub fn orthonormalize_columns(&mut self) {
        let eps = 1e-12;
        for j in 0..self.cols {
            for k in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..self.rows {
                    dot += self.get(i, k).conj() * self.get(i, j);
                }
                for i in 0..self.rows {
                    let v = self.get(i, j) - dot * self.get(i, k);
                    self.set(i, j, v);
                }
            }
            let mut n = self.col_norm(j);
            if n < eps {
                // Deflated column: substitute unit basis vectors until one
                // survives projection against the earlier columns.
                'basis: for b in 0..self.rows {
                    for i in 0..self.rows {
                        self.set(i, j, Complex64::new(if i == b { 1.0 } else { 0.0 }, 0.0));
                    }
                    for k in 0..j {
                        let mut dot = Complex64::new(0.0, 0.0);
                        for i in 0..self.rows {
                            dot += self.get(i, k).conj() * self.get(i, j);
                        }
                        for i in 0..self.rows {
                            let v = self.get(i, j) - dot * self.get(i, k);
                            self.set(i, j, v);
                        }
                    }
                    n = self.col_norm(j);
                    if n >= eps {
                        break 'basis;
                    }
                }
            }
            let inv = 1.0 / n;
            for i in 0..self.rows {
                let v = self.get(i, j) * inv;
                self.set(i, j, v);
            }
        }
    }

    /// Keeps the first `k` columns.
    pub fn take_cols(&self, k: usize) -> CMat {
        assert!(k <= self.cols);
        CMat::from_fn(self.rows, k, |i, j| self.get(i, j))
    }

    /// Stacks `blocks` vertically; all must share the column count.
    pub fn vstack(blocks: &[&CMat]) -> CMat {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&b.data);
        }
        CMat { rows, cols, data }
    }

    /// Error message helper used by shape checks that must name an operand.
    pub(crate) fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factorization of a Hermitian positive definite matrix.
/// Returns the lower-triangular `L` with `A = L L^H`.
pub fn cholesky(a: &CMat) -> Result<CMat, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::ShapeMismatch(format!("cholesky of {}", a.shape_str())));
    }
    let n = a.rows();
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k).conj();
            }
            if i == j {
                let pivot = sum.re;
                if pivot <= 0.0 || !pivot.is_finite() {
                    return Err(LinalgError::NotPositiveDefinite { pivot: i, value: pivot });
                }
                l.set(i, j, Complex64::new(pivot.sqrt(), 0.0));
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solves `L X = B` for lower-triangular `L` by forward substitution.
pub fn solve_lower(l: &CMat, b: &CMat) -> CMat {
    assert_eq!(l.rows(), l.cols());
    assert_eq!(l.rows(), b.rows(), "solve_lower shape");
    let n = l.rows();
    let mut x = b.clone();
    for col in 0..b.cols() {
        for i in 0..n {
            let mut sum = x.get(i, col);
            for k in 0..i {
                sum -= l.get(i, k) * x.get(k, col);
            }
            x.set(i, col, sum / l.get(i, i));
        }
    }
    x
}

/// Solves `L^H X = B` for lower-triangular `L` by back substitution.
pub fn solve_lower_adjoint(l: &CMat, b: &CMat) -> CMat {
    assert_eq!(l.rows(), l.cols());
    assert_eq!(l.rows(), b.rows(), "solve_lower_adjoint shape");
    let n = l.rows();
    let mut x = b.clone();
    for col in 0..b.cols() {
        for ii in 0..n {
            let i = n - 1 - ii;
            let mut sum = x.get(i, col);
            for k in (i + 1)..n {
                sum -= l.get(k, i).conj() * x.get(k, col);
            }
            x.set(i, col, sum / l.get(i, i).conj());
        }
    }
    x
}

/// Solves `L x = b` for a single vector.
pub fn solve_lower_vec(l: &CMat, b: &[Complex64]) -> Vec<Complex64> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    let mut x = b.to_vec();
    for i in 0..n {
        let mut sum = x[i];
        for k in 0..i {
            sum -= l.get(i, k) * x[k];
        }
        x[i] = sum / l.get(i, i);
    }
    x
}

/// Hermitian-PD linear solve `A X = B` through the Cholesky factor.
pub fn solve_hpd(a: &CMat, b: &CMat) -> Result<CMat, LinalgError> {
    let l = cholesky(a)?;
    Ok(solve_lower_adjoint(&l, &solve_lower(&l, b)))
}
