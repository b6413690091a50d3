//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small dense matrices (dimension at most a few
//! hundred). The Hermitian eigensolver is a cyclic complex Jacobi method and
//! singular values come from one-sided (Hestenes) Jacobi, both of which are
//! deterministic and accurate for the rank-deficient operators that show up
//! in this problem.

mod eigh;
mod svd;

pub use eigh::{eigh, eigh_matrix, Spectrum};
pub use svd::singular_values;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Absolute, entrywise tolerance for Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default cap on the number of entries of a Kronecker product.
pub const DEFAULT_KRON_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix dimensions must be strictly positive, got {rows}x{cols}")]
    EmptyDimension { rows: usize, cols: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Kronecker product would have {entries} entries, cap is {cap}")]
    KronCap { entries: usize, cap: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// In-place `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: C64) -> Result<(), LinalgError> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Matrix product. Zero entries of `self` are skipped, which makes
    /// products with permutation-like (Pauli) factors cost O(n^2).
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m) = (self.rows, other.cols);
        let mut out = vec![C64::new(0.0, 0.0); n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * m..(k + 1) * m];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: out,
        })
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64, LinalgError> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "trace of {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        Ok(acc)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let nested: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        nested.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let nested: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows = nested.len();
        let cols = nested.first().map_or(0, Vec::len);
        if nested.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        let data = nested
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(rows, cols, data).map_err(serde::de::Error::custom)
    }
}

/// Square matrix certified Hermitian within [`HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Checks Hermiticity and stores the symmetrized `(A + A^dagger)/2`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows,
                cols: matrix.cols,
            });
        }
        if !matrix.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian {
                deviation,
                tol: HERMITIAN_TOL,
            });
        }
        let n = matrix.rows;
        let sym = ComplexMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(matrix[(r, r)].re, 0.0)
            } else {
                (matrix[(r, c)] + matrix[(c, r)].conj()) * 0.5
            }
        });
        Ok(Self { matrix: sym })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    /// Rank-one projector onto the (normalized) vector `v`.
    pub fn projector(v: &[C64]) -> Self {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let u: Vec<C64> = v.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&u, &u)).expect("outer product is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn kron(&self, other: &Self) -> Result<Self, LinalgError> {
        Ok(Self {
            matrix: kron(&self.matrix, &other.matrix)?,
        })
    }

    /// Real part of `tr(self * other)`; exact for two Hermitian operators.
    pub fn inner(&self, other: &Self) -> Result<f64, LinalgError> {
        Ok(self.matrix.trace_product(&other.matrix)?.re)
    }
}

impl Serialize for HermitianOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianOperator::new(m).map_err(serde::de::Error::custom)
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    kron_with_cap(a, b, DEFAULT_KRON_CAP)
}

pub fn kron_with_cap(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cap: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let entries = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c));
    match entries {
        Some(e) if e <= cap => {}
        _ => {
            return Err(LinalgError::KronCap {
                entries: entries.unwrap_or(usize::MAX),
                cap,
            })
        }
    }
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for br in 0..b.rows {
                let dst = (ar * b.rows + br) * cols + ac * b.cols;
                for bc in 0..b.cols {
                    out.data[dst + bc] = x * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

/// Transposes the second tensor factor of an operator on `C^dim_a (x) C^dim_b`.
pub fn partial_transpose(
    op: &HermitianOperator,
    dim_a: usize,
    dim_b: usize,
) -> Result<HermitianOperator, LinalgError> {
    let n = op.dim();
    if dim_a == 0 || dim_b == 0 || dim_a * dim_b != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "operator of dimension {n} is not {dim_a} x {dim_b}"
        )));
    }
    let m = op.matrix();
    let out = ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / dim_b, r % dim_b);
        let (a2, b2) = (c / dim_b, c % dim_b);
        m[(a * dim_b + b2, a2 * dim_b + b)]
    });
    // a permutation of a Hermitian matrix's entries that stays Hermitian
    Ok(HermitianOperator { matrix: out })
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_z_z_is_diagonal() {
        let zz = kron(&pauli_z(), &pauli_z()).unwrap();
        assert_eq!(zz, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_respects_cap() {
        let a = ComplexMatrix::identity(64);
        let err = kron_with_cap(&a, &a, 1000).unwrap_err();
        assert!(matches!(err, LinalgError::KronCap { entries: 16_777_216, cap: 1000 }));
        assert!(kron(&ComplexMatrix::identity(1024), &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn hermitian_check_rejects_and_reports_deviation() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1., 0.), c(0., 1.), c(0., 1.), c(1., 0.)])
            .unwrap();
        match HermitianOperator::new(m) {
            Err(LinalgError::NotHermitian { deviation, .. }) => assert!((deviation - 2.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(rect), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn hermitian_check_symmetrizes_small_noise() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1., 1e-14), c(0.5, 0.1), c(0.5, -0.1 + 1e-13), c(2., 0.)],
        )
        .unwrap();
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
        assert_eq!(h.matrix()[(0, 0)].im, 0.0);
    }

    #[test]
    fn partial_transpose_of_product_transposes_second_factor() {
        let ra = ComplexMatrix::from_row_major(2, 2, vec![c(0.7, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.)])
            .unwrap();
        let rb = ComplexMatrix::from_row_major(2, 2, vec![c(0.4, 0.), c(0.0, 0.3), c(0.0, -0.3), c(0.6, 0.)])
            .unwrap();
        let prod = HermitianOperator::new(kron(&ra, &rb).unwrap()).unwrap();
        let pt = partial_transpose(&prod, 2, 2).unwrap();
        let expected = kron(&ra, &rb.transpose()).unwrap();
        assert!(pt.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_transpose_dimension_mismatch() {
        let op = HermitianOperator::identity(6);
        assert!(partial_transpose(&op, 2, 2).is_err());
        assert!(partial_transpose(&op, 2, 3).is_ok());
    }

    #[test]
    fn norms_of_identity_and_projector() {
        for d in 1..6 {
            let id = ComplexMatrix::identity(d);
            assert!((trace_norm(&id) - d as f64).abs() < 1e-12);
            assert!((frobenius_norm(&id) - (d as f64).sqrt()).abs() < 1e-12);
        }
        let v = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let p = HermitianOperator::projector(&v);
        assert!((trace_norm(p.matrix()) - 1.0).abs() < 1e-12);
        assert!((frobenius_norm(p.matrix()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matmul_dimension_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(a.matmul(&ComplexMatrix::zeros(3, 1)).is_ok());
    }

    #[test]
    fn json_uses_nested_re_im_pairs() {
        let m = ComplexMatrix::from_row_major(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[1,0],[2,0]]]").is_err());
    }
}
