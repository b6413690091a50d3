//! Task combinatorics and the sub-normalized Pauli product basis.
//!
//! Index conventions (normative for every serialized index in this crate):
//!
//! * a single-copy input `x` is a flat index in `0..16` and decomposes into a
//!   digit pair `(i, j)` in `{0,1,2,3}^2` as `x = 4 i + j`. In one-based terms
//!   this is `k = 4 i + j + 1`, and the one-based pair is `(i + 1, j + 1)`.
//! * Pauli digits are ordered `(I, X, Y, Z)`, each scaled by `1/sqrt(2)`.
//! * an `N`-copy index is the base-16 number with the first copy most
//!   significant, which is the same as reading the `2N` Pauli digits in base 4.

use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::linalg::{kron, ComplexMatrix, HermitianOperator, C64};

/// The 4x4 Hadamard matrix defining the task functions.
pub const T_MATRIX: [[i8; 4]; 4] = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];

/// Number of inputs per copy.
pub const INPUTS: usize = 16;

/// Largest Pauli basis we construct (dimension 256).
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaskError {
    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("sign entries must be +1 or -1, found {0}")]
    InvalidSign(i8),
    #[error("dense M matrix is only materialized for N in {{1, 2}}, got N = {0}")]
    MMatrixTooLarge(usize),
    #[error("Pauli basis on {0} qubits exceeds the cap of {MAX_QUBITS}")]
    BasisTooLarge(usize),
}

/// Single-copy input label in `0..16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputIndex(u8);

impl InputIndex {
    pub fn new(flat: usize) -> Result<Self, TaskError> {
        if flat >= INPUTS {
            return Err(TaskError::IndexOutOfRange {
                index: flat,
                bound: INPUTS,
            });
        }
        Ok(Self(flat as u8))
    }

    /// From the one-based label `k` in `1..=16`.
    pub fn one_based(k: usize) -> Result<Self, TaskError> {
        if k == 0 {
            return Err(TaskError::IndexOutOfRange { index: 0, bound: INPUTS });
        }
        Self::new(k - 1)
    }

    /// From the one-based pair `(x1, x2)` in `[4]^2`.
    pub fn from_pair(x1: usize, x2: usize) -> Result<Self, TaskError> {
        for v in [x1, x2] {
            if !(1..=4).contains(&v) {
                return Err(TaskError::IndexOutOfRange { index: v, bound: 5 });
            }
        }
        Self::new(4 * (x1 - 1) + (x2 - 1))
    }

    pub fn all() -> impl Iterator<Item = InputIndex> {
        (0..INPUTS as u8).map(InputIndex)
    }

    pub fn flat(self) -> usize {
        self.0 as usize
    }

    /// Pauli digits `(i, j)`, zero-based.
    pub fn digits(self) -> (usize, usize) {
        (self.flat() / 4, self.flat() % 4)
    }

    /// One-based pair `(x1, x2)`.
    pub fn pair(self) -> (usize, usize) {
        let (i, j) = self.digits();
        (i + 1, j + 1)
    }
}

/// `f_{xz} = T[x1][z1] * T[x2][z2]`.
pub fn f_coeff(x: InputIndex, z: InputIndex) -> i8 {
    F_TABLE[x.flat()][z.flat()]
}

const F_TABLE: [[i8; 16]; 16] = {
    let mut t = [[0i8; 16]; 16];
    let mut x = 0;
    while x < 16 {
        let mut z = 0;
        while z < 16 {
            t[x][z] = T_MATRIX[x / 4][z / 4] * T_MATRIX[x % 4][z % 4];
            z += 1;
        }
        x += 1;
    }
    t
};

/// Product of `f` over copies for multi-copy indices.
pub fn f_product(x: &[InputIndex], z: &[InputIndex]) -> Result<i8, TaskError> {
    if x.len() != z.len() {
        return Err(TaskError::LengthMismatch(format!("{} vs {} copies", x.len(), z.len())));
    }
    Ok(x.iter().zip(z).map(|(&a, &b)| f_coeff(a, b)).product())
}

/// Flat index of an `N`-copy input, first copy most significant.
pub fn flat_multi_index(idx: &[InputIndex]) -> usize {
    idx.iter().fold(0, |acc, i| acc * INPUTS + i.flat())
}

pub fn split_multi_index(mut flat: usize, n_copies: usize) -> Vec<InputIndex> {
    let mut out = vec![InputIndex(0); n_copies];
    for slot in out.iter_mut().rev() {
        *slot = InputIndex((flat % INPUTS) as u8);
        flat /= INPUTS;
    }
    out
}

/// Sign degrees of freedom `s_z`, either a per-copy product or a full table.
#[derive(Clone, Debug, PartialEq)]
pub enum SignVector {
    /// `s_{z_vec} = prod_i s[z_i]`.
    Product { per_copy: [i8; 16], n_copies: usize },
    /// Explicit entry for each of the `16^N` multi-indices.
    Full { signs: Vec<i8>, n_copies: usize },
}

impl SignVector {
    pub fn product(per_copy: [i8; 16], n_copies: usize) -> Result<Self, TaskError> {
        if let Some(&bad) = per_copy.iter().find(|&&s| s != 1 && s != -1) {
            return Err(TaskError::InvalidSign(bad));
        }
        Ok(Self::Product { per_copy, n_copies })
    }

    pub fn full(signs: Vec<i8>, n_copies: usize) -> Result<Self, TaskError> {
        let expected = INPUTS.pow(n_copies as u32);
        if signs.len() != expected {
            return Err(TaskError::LengthMismatch(format!(
                "{} signs for {n_copies} copies (expected {expected})",
                signs.len()
            )));
        }
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(TaskError::InvalidSign(bad));
        }
        Ok(Self::Full { signs, n_copies })
    }

    pub fn all_plus(n_copies: usize) -> Self {
        Self::Product {
            per_copy: [1; 16],
            n_copies,
        }
    }

    /// `s_k = sgn(lambda_k)` with `sgn(0) = +1`.
    pub fn from_coefficients(lambdas: &[f64], n_copies: usize) -> Result<Self, TaskError> {
        Self::full(lambdas.iter().map(|&l| sign_of(l)).collect(), n_copies)
    }

    pub fn n_copies(&self) -> usize {
        match self {
            Self::Product { n_copies, .. } | Self::Full { n_copies, .. } => *n_copies,
        }
    }

    pub fn sign(&self, z: &[InputIndex]) -> i8 {
        match self {
            Self::Product { per_copy, .. } => z.iter().map(|i| per_copy[i.flat()]).product(),
            Self::Full { signs, .. } => signs[flat_multi_index(z)],
        }
    }

    pub fn sign_flat(&self, flat: usize) -> i8 {
        match self {
            Self::Product { n_copies, .. } => self.sign(&split_multi_index(flat, *n_copies)),
            Self::Full { signs, .. } => signs[flat],
        }
    }
}

pub fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// `w_z(x, y) = s_z prod_i f(x_i, z_i) f(y_i, z_i)`.
pub fn w_value(
    x: &[InputIndex],
    y: &[InputIndex],
    z: &[InputIndex],
    s: &SignVector,
) -> Result<i8, TaskError> {
    if x.len() != y.len() || x.len() != z.len() || s.n_copies() != z.len() {
        return Err(TaskError::LengthMismatch(format!(
            "x: {}, y: {}, z: {}, signs: {}",
            x.len(),
            y.len(),
            z.len(),
            s.n_copies()
        )));
    }
    Ok(s.sign(z) * f_product(x, z)? * f_product(y, z)?)
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub dim: usize,
    pub entries: Vec<i64>,
}

impl IntMatrix {
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.dim + c]
    }

    pub fn is_scaled_identity(&self, scale: i64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| self.get(r, c) == if r == c { scale } else { 0 }))
    }
}

/// `M_{x,x'} = sum_z prod_i f(x_i, z_i) f(x'_i, z_i)` over `[16]^N`.
pub fn m_matrix(n_copies: usize) -> Result<IntMatrix, TaskError> {
    if !(1..=2).contains(&n_copies) {
        return Err(TaskError::MMatrixTooLarge(n_copies));
    }
    let dim = INPUTS.pow(n_copies as u32);
    let idx: Vec<Vec<InputIndex>> = (0..dim).map(|f| split_multi_index(f, n_copies)).collect();
    let f: Vec<Vec<i8>> = idx
        .iter()
        .map(|x| idx.iter().map(|z| f_product(x, z).expect("same length")).collect())
        .collect();
    let mut entries = vec![0i64; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            entries[a * dim + b] = (0..dim).map(|z| (f[a][z] * f[b][z]) as i64).sum();
        }
    }
    Ok(IntMatrix { dim, entries })
}

/// `T T^T` in integer arithmetic.
pub fn t_gram() -> [[i32; 4]; 4] {
    let mut g = [[0i32; 4]; 4];
    for (r, row) in g.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = (0..4).map(|k| (T_MATRIX[r][k] * T_MATRIX[c][k]) as i32).sum();
        }
    }
    g
}

fn single_pauli(digit: u8) -> ComplexMatrix {
    let (o, l, i) = (C64::new(0., 0.), C64::new(1., 0.), C64::new(0., 1.));
    let entries = match digit {
        0 => vec![l, o, o, l],
        1 => vec![o, l, l, o],
        2 => vec![o, -i, i, o],
        3 => vec![l, o, o, -l],
        _ => unreachable!("Pauli digits are 0..4"),
    };
    ComplexMatrix::from_row_major(2, 2, entries).expect("2x2")
}

/// A tensor product of Pauli matrices, `digits[0]` acting on the most
/// significant qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub digits: Vec<u8>,
}

impl PauliString {
    pub fn from_flat(flat: usize, n_qubits: usize) -> Self {
        let mut digits = vec![0u8; n_qubits];
        let mut f = flat;
        for d in digits.iter_mut().rev() {
            *d = (f % 4) as u8;
            f /= 4;
        }
        Self { digits }
    }

    pub fn flat(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * 4 + d as usize)
    }

    pub fn n_qubits(&self) -> usize {
        self.digits.len()
    }

    /// Unitary (unnormalized) Pauli string, entries in `{0, +-1, +-i}`.
    pub fn unitary(&self) -> ComplexMatrix {
        self.digits
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, &d| {
                kron(&acc, &single_pauli(d)).expect("Pauli strings stay below the kron cap")
            })
    }

    /// `(-1)^{number of Y factors}`, the sign picked up under transposition.
    pub fn transpose_sign(&self) -> i8 {
        if self.digits.iter().filter(|&&d| d == 2).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `+1` if the two strings commute, `-1` if they anticommute.
    pub fn commutation_sign(&self, other: &Self) -> i8 {
        self.digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| T_MATRIX[a as usize][b as usize])
            .product()
    }
}

/// Orthonormal Hermitian basis `{sigma_{d_1} (x) ... (x) sigma_{d_n}}` with
/// `sigma = (I, X, Y, Z)/sqrt(2)`.
///
/// Elements are generated on demand, so the basis can be described for up to
/// [`MAX_QUBITS`] qubits even where materializing all `4^n` matrices would not
/// fit in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliBasis {
    n_qubits: usize,
}

impl PauliBasis {
    pub fn new(n_qubits: usize) -> Result<Self, TaskError> {
        if n_qubits > MAX_QUBITS {
            return Err(TaskError::BasisTooLarge(n_qubits));
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Number of elements `4^n`.
    pub fn len(&self) -> usize {
        1 << (2 * self.n_qubits)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn string(&self, k: usize) -> PauliString {
        PauliString::from_flat(k, self.n_qubits)
    }

    /// Scale turning a basis element into a unitary, `2^{n/2}`.
    pub fn unitary_scale(&self) -> f64 {
        (self.dim() as f64).sqrt()
    }

    pub fn element(&self, k: usize) -> HermitianOperator {
        assert!(k < self.len(), "basis index {k} out of range");
        let scale = FRAC_1_SQRT_2.powi(self.n_qubits as i32);
        HermitianOperator::new(self.string(k).unitary().scale_real(scale))
            .expect("Pauli strings are Hermitian")
    }

    pub fn elements(&self) -> impl Iterator<Item = HermitianOperator> + '_ {
        (0..self.len()).map(|k| self.element(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(k: usize) -> InputIndex {
        InputIndex::one_based(k).unwrap()
    }

    #[test]
    fn t_is_hadamard() {
        assert_eq!(t_gram(), [[4, 0, 0, 0], [0, 4, 0, 0], [0, 0, 4, 0], [0, 0, 0, 4]]);
    }

    #[test]
    fn pair_bijection() {
        for k in 1..=16 {
            let x = ix(k);
            let (a, b) = x.pair();
            assert_eq!(4 * (a - 1) + b, k);
            assert_eq!(InputIndex::from_pair(a, b).unwrap(), x);
        }
        assert!(InputIndex::new(16).is_err());
        assert!(InputIndex::one_based(0).is_err());
        assert!(InputIndex::from_pair(5, 1).is_err());
    }

    #[test]
    fn f_first_row_and_column_are_ones() {
        for z in InputIndex::all() {
            assert_eq!(f_coeff(ix(1), z), 1);
            assert_eq!(f_coeff(z, ix(1)), 1);
        }
    }

    #[test]
    fn f_worked_entry() {
        let x = InputIndex::from_pair(2, 3).unwrap();
        let z = InputIndex::from_pair(3, 4).unwrap();
        assert_eq!(f_coeff(x, z), 1);
        assert_eq!(T_MATRIX[1][2], -1);
        assert_eq!(T_MATRIX[2][3], -1);
    }

    #[test]
    fn w_examples() {
        let one = [ix(1)];
        assert_eq!(w_value(&one, &one, &one, &SignVector::all_plus(1)).unwrap(), 1);

        let x = [InputIndex::from_pair(2, 3).unwrap()];
        let y = [InputIndex::from_pair(4, 2).unwrap()];
        let z = [InputIndex::from_pair(3, 4).unwrap()];
        // T43 * T24 = (-1)(-1)
        assert_eq!(T_MATRIX[3][2] * T_MATRIX[1][3], 1);
        assert_eq!(w_value(&x, &y, &z, &SignVector::all_plus(1)).unwrap(), 1);
    }

    #[test]
    fn w_is_a_product_over_copies() {
        let mut per = [1i8; 16];
        per[5] = -1;
        let s2 = SignVector::product(per, 2).unwrap();
        let s1 = SignVector::product(per, 1).unwrap();
        let x = [ix(1), ix(6)];
        let y = [ix(3), ix(2)];
        let z = [ix(1), ix(6)];
        let w0 = w_value(&x[..1], &y[..1], &z[..1], &s1).unwrap();
        let w1 = w_value(&x[1..], &y[1..], &z[1..], &s1).unwrap();
        assert_eq!((w0, w1), (1, -1));
        assert_eq!(w_value(&x, &y, &z, &s2).unwrap(), -1);
    }

    #[test]
    fn w_length_mismatch() {
        let s = SignVector::all_plus(1);
        assert!(w_value(&[ix(1)], &[ix(1), ix(2)], &[ix(1)], &s).is_err());
        assert!(w_value(&[ix(1), ix(1)], &[ix(1), ix(2)], &[ix(1), ix(3)], &s).is_err());
    }

    #[test]
    fn sign_vector_validation() {
        assert!(SignVector::product([0; 16], 1).is_err());
        assert!(SignVector::full(vec![1; 15], 1).is_err());
        let full = SignVector::full((0..256).map(|k| if k % 3 == 0 { -1 } else { 1 }).collect(), 2).unwrap();
        assert_eq!(full.sign(&[ix(1), ix(1)]), -1);
        assert_eq!(full.sign_flat(1), 1);
    }

    #[test]
    fn m_matrix_values() {
        assert!(m_matrix(1).unwrap().is_scaled_identity(16));
        let m2 = m_matrix(2).unwrap();
        assert_eq!(m2.dim, 256);
        assert!(m2.is_scaled_identity(256));
        assert!(matches!(m_matrix(3), Err(TaskError::MMatrixTooLarge(3))));
        assert!(m_matrix(0).is_err());
    }

    #[test]
    fn multi_index_round_trip() {
        for flat in [0usize, 1, 17, 255, 4095] {
            let idx = split_multi_index(flat, 3);
            assert_eq!(flat_multi_index(&idx), flat);
        }
    }

    #[test]
    fn single_qubit_basis() {
        let b = PauliBasis::new(1).unwrap();
        assert_eq!(b.len(), 4);
        let g0 = b.element(0);
        let expected = ComplexMatrix::identity(2).scale_real(FRAC_1_SQRT_2);
        assert!(g0.matrix().max_abs_diff(&expected) < 1e-16);
    }

    #[test]
    fn two_qubit_basis_orthonormal_exhaustive() {
        let b = PauliBasis::new(2).unwrap();
        let els: Vec<_> = b.elements().collect();
        assert_eq!(els.len(), 16);
        for (k, gk) in els.iter().enumerate() {
            for (l, gl) in els.iter().enumerate() {
                let ip = gk.inner(gl).unwrap();
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scaled_two_qubit_elements_are_unitary() {
        let b = PauliBasis::new(2).unwrap();
        for g in b.elements() {
            let u = g.matrix().scale_real(2.0);
            let uu = u.adjoint().matmul(&u).unwrap();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
        }
    }

    #[test]
    fn conjugation_trace_identity_exhaustive() {
        // |tr(G_x G_k G_x^dagger G_z)| = delta_{kz} / 4 on the dim-4 basis
        let b = PauliBasis::new(2).unwrap();
        let els: Vec<_> = b.elements().map(|g| g.into_matrix()).collect();
        for gx in &els {
            let gxd = gx.adjoint();
            for (k, gk) in els.iter().enumerate() {
                let left = gx.matmul(gk).unwrap().matmul(&gxd).unwrap();
                for (z, gz) in els.iter().enumerate() {
                    let t = left.trace_product(gz).unwrap().norm();
                    let expected = if k == z { 0.25 } else { 0.0 };
                    assert!((t - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn commutation_trace_reproduces_f() {
        // tr(G_x G_z G_x G_z) = f_{xz} / 4
        let b = PauliBasis::new(2).unwrap();
        for x in InputIndex::all() {
            let gx = b.element(x.flat()).into_matrix();
            for z in InputIndex::all() {
                let gz = b.element(z.flat()).into_matrix();
                let t = gx.matmul(&gz).unwrap().matmul(&gx).unwrap().trace_product(&gz).unwrap();
                assert!((t.re - f_coeff(x, z) as f64 / 4.0).abs() < 1e-14);
                assert_eq!(b.string(x.flat()).commutation_sign(&b.string(z.flat())), f_coeff(x, z));
            }
        }
    }

    #[test]
    fn basis_cap() {
        assert!(PauliBasis::new(8).is_ok());
        assert!(matches!(PauliBasis::new(9), Err(TaskError::BasisTooLarge(9))));
        let big = PauliBasis::new(8).unwrap();
        assert_eq!(big.len(), 65536);
        assert_eq!(big.dim(), 256);
    }

    #[test]
    fn transpose_sign_matches_matrix_transpose() {
        let b = PauliBasis::new(2).unwrap();
        for k in 0..16 {
            let g = b.element(k).into_matrix();
            let sign = b.string(k).transpose_sign() as f64;
            assert!(g.transpose().max_abs_diff(&g.scale_real(sign)) < 1e-15);
        }
    }
}
