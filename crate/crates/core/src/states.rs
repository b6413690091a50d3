//! Bloch-diagonal states `rho = sum_k lambda_k G_k (x) G_k` over the Pauli
//! product basis, and entanglement diagnostics (PPT, realignment, CCNR).
//!
//! Every operator `P_k (x) P_k` is diagonal in the generalized Bell basis
//! `(I (x) P_b)|Phi+>`, with eigenvalue `t_k * c(k, b)` where `t_k` is the
//! transposition sign of `P_k` and `c` the commutation sign. The spectrum of a
//! Bloch-diagonal state is therefore a (scaled) Kronecker-structured Hadamard
//! transform of its coefficients, and its partial transpose is again
//! Bloch-diagonal with coefficients `t_k lambda_k`. [`bell_eigenvalues`] and
//! [`partial_transpose_coefficients`] implement these exact fast paths; the
//! dense paths ([`BlochDiagonalState::densify`], [`ppt_check`]) are kept as
//! independent cross-checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, eigh, kron, ComplexMatrix, HermitianOperator, LinalgError, C64};
use crate::pauli::{PauliBasis, PauliString, TaskError, T_MATRIX};

/// Eigenvalues at or above `-PSD_TOL` count as non-negative.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on the identity coefficient `1/D`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Largest coefficient vector (`4^10 = 2^20` entries).
pub const MAX_QUBITS_PER_SIDE: usize = 10;
/// Largest local register that is densified (`dim 16`, i.e. two copies).
pub const MAX_DENSE_QUBITS_PER_SIDE: usize = 4;
/// Negative-sign labels of the bound entangled state, one-based.
pub const RHO_BE_NEGATIVE_LABELS: [usize; 5] = [7, 9, 11, 12, 16];
pub const CONVENTION_TAG: &str = "k=4i+j+1";

#[derive(Debug, Error)]
pub enum StateError {
    #[error("expected {expected} coefficients, got {found}")]
    Length { expected: usize, found: usize },
    #[error("identity coefficient is {found}, expected {expected} for trace one")]
    Normalization { found: f64, expected: f64 },
    #[error("coefficients do not describe a positive semidefinite state (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("{qubits} qubits per side exceeds the cap of {cap}")]
    TooLarge { qubits: usize, cap: usize },
    #[error("state on {qubits} qubits per side is not a whole number of four-dimensional copies")]
    NotCopies { qubits: usize },
    #[error("visibility {0} outside [0, 1]")]
    Visibility(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index convention check failed: {0}")]
    Convention(String),
    #[error("unsupported state file convention {0:?}")]
    UnknownConvention(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("malformed state JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// How the one-based sign labels of the bound entangled state are mapped onto
/// Pauli digit pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexConvention {
    /// `k = 4 i + j + 1`.
    #[default]
    Standard,
    /// `k = 4 j + i + 1`. A local qubit relabeling: spectra are unchanged.
    Swapped,
    /// Labels read as zero-based flat indices (an off-by-one error); used as a
    /// negative control, it breaks positivity.
    ZeroBased,
}

/// `rho = sum_k lambda_k G_k (x) G_k` on `n` qubits per side (`D = 2^n`).
///
/// `lambdas` is indexed by the Pauli digit string in base 4, which for an
/// `N`-copy state (`n = 2N`) coincides with the flat `[16]^N` multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochDiagonalState {
    qubits_per_side: usize,
    lambdas: Vec<f64>,
}

impl BlochDiagonalState {
    /// Validates length, normalization, and positivity.
    pub fn new(qubits_per_side: usize, lambdas: Vec<f64>) -> Result<Self, StateError> {
        let state = Self::new_unvalidated(qubits_per_side, lambdas)?;
        let min_eig = state.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(StateError::NotPsd { min_eig });
        }
        Ok(state)
    }

    /// Checks length and normalization only; for diagnosing candidate
    /// coefficient vectors that may not be positive.
    pub fn new_unvalidated(qubits_per_side: usize, lambdas: Vec<f64>) -> Result<Self, StateError> {
        if qubits_per_side == 0 || qubits_per_side > MAX_QUBITS_PER_SIDE {
            return Err(StateError::TooLarge {
                qubits: qubits_per_side,
                cap: MAX_QUBITS_PER_SIDE,
            });
        }
        let expected = 1usize << (2 * qubits_per_side);
        if lambdas.len() != expected {
            return Err(StateError::Length {
                expected,
                found: lambdas.len(),
            });
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(StateError::Linalg(LinalgError::NonFinite));
        }
        let target = 1.0 / (1usize << qubits_per_side) as f64;
        if (lambdas[0] - target).abs() > NORMALIZATION_TOL {
            return Err(StateError::Normalization {
                found: lambdas[0],
                expected: target,
            });
        }
        Ok(Self {
            qubits_per_side,
            lambdas,
        })
    }

    pub fn from_copies(n_copies: usize, lambdas: Vec<f64>) -> Result<Self, StateError> {
        Self::new(2 * n_copies, lambdas)
    }

    pub fn maximally_mixed(qubits_per_side: usize) -> Result<Self, StateError> {
        if qubits_per_side == 0 || qubits_per_side > MAX_QUBITS_PER_SIDE {
            return Err(StateError::TooLarge {
                qubits: qubits_per_side,
                cap: MAX_QUBITS_PER_SIDE,
            });
        }
        let mut l = vec![0.0; 1 << (2 * qubits_per_side)];
        l[0] = 1.0 / (1usize << qubits_per_side) as f64;
        Self::new(qubits_per_side, l)
    }

    pub fn qubits_per_side(&self) -> usize {
        self.qubits_per_side
    }

    /// Number of four-dimensional copies, if the register splits into them.
    pub fn n_copies(&self) -> Option<usize> {
        (self.qubits_per_side % 2 == 0).then_some(self.qubits_per_side / 2)
    }

    pub fn local_dim(&self) -> usize {
        1 << self.qubits_per_side
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn basis(&self) -> PauliBasis {
        PauliBasis::new(self.qubits_per_side.min(crate::pauli::MAX_QUBITS))
            .expect("dense basis only requested for small registers")
    }

    /// Fast CCNR value `sum_k |lambda_k|`.
    pub fn ccnr(&self) -> f64 {
        self.lambdas.iter().map(|l| l.abs()).sum()
    }

    /// Unsorted spectrum, indexed by Bell-basis label.
    pub fn bell_spectrum(&self) -> Vec<f64> {
        bell_eigenvalues(&self.lambdas, self.qubits_per_side)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.bell_spectrum().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// The partial transpose over B, itself Bloch-diagonal.
    pub fn partial_transpose(&self) -> BlochDiagonalState {
        Self {
            qubits_per_side: self.qubits_per_side,
            lambdas: partial_transpose_coefficients(&self.lambdas, self.qubits_per_side),
        }
    }

    /// Dense `D^2 x D^2` operator, ordered `A (x) B`.
    pub fn densify(&self) -> Result<HermitianOperator, StateError> {
        if self.qubits_per_side > MAX_DENSE_QUBITS_PER_SIDE {
            return Err(StateError::TooLarge {
                qubits: self.qubits_per_side,
                cap: MAX_DENSE_QUBITS_PER_SIDE,
            });
        }
        let d = self.local_dim();
        let mut rho = ComplexMatrix::zeros(d * d, d * d);
        for (k, &lambda) in self.lambdas.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            let p = PauliString::from_flat(k, self.qubits_per_side).unitary();
            let term = kron(&p, &p)?;
            rho.add_scaled(&term, C64::new(lambda / d as f64, 0.0))?;
        }
        let op = HermitianOperator::new(rho)?;
        debug_assert!((op.trace() - 1.0).abs() < 1e-12);
        Ok(op)
    }

    pub fn to_json(&self) -> StateFile {
        StateFile {
            n_copies: self.n_copies(),
            local_dim: Some(self.local_dim()),
            lambdas: self.lambdas.clone(),
            convention: CONVENTION_TAG.to_string(),
        }
    }

    pub fn from_json(file: &StateFile) -> Result<Self, StateError> {
        if file.convention != CONVENTION_TAG {
            return Err(StateError::UnknownConvention(file.convention.clone()));
        }
        let qubits = match (file.n_copies, file.local_dim) {
            (Some(n), _) => 2 * n,
            (None, Some(d)) if d.is_power_of_two() && d > 1 => d.trailing_zeros() as usize,
            (None, Some(d)) => {
                return Err(StateError::DimensionMismatch(format!(
                    "local dimension {d} is not a power of two"
                )))
            }
            (None, None) => {
                return Err(StateError::DimensionMismatch(
                    "state file needs n_copies or local_dim".into(),
                ))
            }
        };
        if let (Some(n), Some(d)) = (file.n_copies, file.local_dim) {
            if 1usize.checked_shl(2 * n as u32) != Some(d) {
                return Err(StateError::DimensionMismatch(format!(
                    "n_copies {n} disagrees with local_dim {d}"
                )));
            }
        }
        Self::new(qubits, file.lambdas.clone())
    }
}

/// Interchange format for states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_copies: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_dim: Option<usize>,
    pub lambdas: Vec<f64>,
    pub convention: String,
}

/// Per-qubit factor `h[b][a] = t(a) T[a][b]` of the Bell-basis transform.
const BELL_FACTOR: [[f64; 4]; 4] = {
    let t = [1.0, 1.0, -1.0, 1.0];
    let mut h = [[0.0; 4]; 4];
    let mut b = 0;
    while b < 4 {
        let mut a = 0;
        while a < 4 {
            h[b][a] = t[a] * T_MATRIX[a][b] as f64;
            a += 1;
        }
        b += 1;
    }
    h
};

fn apply_factor(v: &mut [f64], qubits: usize, transpose: bool) {
    let mut buf = [0.0f64; 4];
    for pos in 0..qubits {
        let stride = 1usize << (2 * (qubits - 1 - pos));
        let block = stride * 4;
        for start in (0..v.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (b, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..4)
                        .map(|a| {
                            let h = if transpose { BELL_FACTOR[a][b] } else { BELL_FACTOR[b][a] };
                            h * v[base + a * stride]
                        })
                        .sum();
                }
                for (b, &val) in buf.iter().enumerate() {
                    v[base + b * stride] = val;
                }
            }
        }
    }
}

/// Eigenvalues of `sum_k lambda_k G_k (x) G_k`, indexed by Bell label.
pub fn bell_eigenvalues(lambdas: &[f64], qubits: usize) -> Vec<f64> {
    let mut v = lambdas.to_vec();
    apply_factor(&mut v, qubits, false);
    let d = (1usize << qubits) as f64;
    v.iter_mut().for_each(|x| *x /= d);
    v
}

/// Inverse of [`bell_eigenvalues`].
pub fn coefficients_from_bell(eigenvalues: &[f64], qubits: usize) -> Vec<f64> {
    let mut v = eigenvalues.to_vec();
    apply_factor(&mut v, qubits, true);
    let d = (1usize << qubits) as f64;
    v.iter_mut().for_each(|x| *x /= d);
    v
}

/// Coefficients of the partial transpose: `lambda_k -> t_k lambda_k`.
pub fn partial_transpose_coefficients(lambdas: &[f64], qubits: usize) -> Vec<f64> {
    lambdas
        .iter()
        .enumerate()
        .map(|(k, &l)| l * PauliString::from_flat(k, qubits).transpose_sign() as f64)
        .collect()
}

/// Exact coefficients of the bound entangled state, in standard storage order.
pub fn rho_be_exact(convention: IndexConvention) -> Vec<BigRational> {
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let twelfth = BigRational::new(BigInt::from(1), BigInt::from(12));
    let mut lambdas = vec![twelfth; 16];
    lambdas[0] = quarter;
    for label in RHO_BE_NEGATIVE_LABELS {
        let flat = match convention {
            IndexConvention::Standard => Some(label - 1),
            IndexConvention::Swapped => {
                let (j, i) = ((label - 1) / 4, (label - 1) % 4);
                Some(4 * i + j)
            }
            IndexConvention::ZeroBased => (label < 16).then_some(label),
        };
        if let Some(f) = flat.filter(|&f| f != 0) {
            lambdas[f] = -lambdas[f].clone();
        }
    }
    lambdas
}

/// The two-ququart bound entangled state.
pub fn rho_be() -> BlochDiagonalState {
    rho_be_with(IndexConvention::Standard).expect("standard convention yields a valid state")
}

pub fn rho_be_with(convention: IndexConvention) -> Result<BlochDiagonalState, StateError> {
    let lambdas = rho_be_exact(convention)
        .iter()
        .map(|r| r.to_f64().expect("finite rational"))
        .collect();
    BlochDiagonalState::new_unvalidated(2, lambdas)
}

/// Builds the bound entangled state under `convention` and checks that it and
/// its partial transpose have spectrum `(1/6 x6, 0 x10)`. Fails with a
/// convention error otherwise; no re-indexing is attempted.
pub fn certify_rho_be(convention: IndexConvention) -> Result<EntanglementReport, StateError> {
    certify_rho_be_lambdas(rho_be_with(convention)?)
}

pub fn certify_rho_be_lambdas(state: BlochDiagonalState) -> Result<EntanglementReport, StateError> {
    let report = ppt_check(&state)?;
    let mut expected = vec![1.0 / 6.0; 6];
    expected.extend([0.0; 10]);
    for (label, spectrum) in [("state", &report.spectrum_state), ("partial transpose", &report.spectrum_pt)] {
        if let Some((i, (a, b))) = spectrum
            .iter()
            .zip(&expected)
            .enumerate()
            .find(|(_, (a, b))| (*a - *b).abs() > PSD_TOL)
        {
            return Err(StateError::Convention(format!(
                "{label} eigenvalue #{i} is {a:.6e}, expected {b:.6e}"
            )));
        }
    }
    Ok(report)
}

/// `N`-fold tensor power of a single-copy state.
pub fn tensor_power(state: &BlochDiagonalState, n_copies: usize) -> Result<BlochDiagonalState, StateError> {
    if state.qubits_per_side != 2 {
        return Err(StateError::DimensionMismatch(format!(
            "tensor_power expects a single four-dimensional copy, got {} qubits per side",
            state.qubits_per_side
        )));
    }
    if n_copies == 0 || 2 * n_copies > MAX_QUBITS_PER_SIDE {
        return Err(StateError::TooLarge {
            qubits: 2 * n_copies,
            cap: MAX_QUBITS_PER_SIDE,
        });
    }
    let mut lambdas = vec![1.0];
    for _ in 0..n_copies {
        lambdas = lambdas
            .iter()
            .flat_map(|&a| state.lambdas.iter().map(move |&b| a * b))
            .collect();
    }
    Ok(BlochDiagonalState {
        qubits_per_side: 2 * n_copies,
        lambdas,
    })
}

/// `v rho + (1 - v) I / D^2`.
pub fn mix_with_white_noise(state: &BlochDiagonalState, v: f64) -> Result<BlochDiagonalState, StateError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(StateError::Visibility(v));
    }
    let mut lambdas: Vec<f64> = state.lambdas.iter().map(|l| l * v).collect();
    lambdas[0] = state.lambdas[0];
    Ok(BlochDiagonalState {
        qubits_per_side: state.qubits_per_side,
        lambdas,
    })
}

/// `R_{kk'} = tr(rho G_k (x) G_k')`.
pub fn realignment(op: &HermitianOperator, basis: &PauliBasis) -> Result<ComplexMatrix, StateError> {
    let d = basis.dim();
    if op.dim() != d * d {
        return Err(StateError::DimensionMismatch(format!(
            "operator of dimension {} is not {d} x {d}",
            op.dim()
        )));
    }
    let n = d * d;
    let rho = op.matrix();
    // reshuffled[(a, a'), (b, b')] = rho[(a, b), (a', b')]
    let reshuffled = ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, a2) = (r / d, r % d);
        let (b, b2) = (c / d, c % d);
        rho[(a * d + b, a2 * d + b2)]
    });
    // column k holds G_k[a', a] at row (a, a')
    let mut cols = ComplexMatrix::zeros(n, n);
    for k in 0..basis.len() {
        let g = basis.element(k);
        let gm = g.matrix();
        for a in 0..d {
            for a2 in 0..d {
                cols[(a * d + a2, k)] = gm[(a2, a)];
            }
        }
    }
    Ok(cols.transpose().matmul(&reshuffled)?.matmul(&cols)?)
}

/// Trace norm of the realignment matrix.
pub fn ccnr_dense(op: &HermitianOperator, basis: &PauliBasis) -> Result<f64, StateError> {
    Ok(linalg::trace_norm(&realignment(op, basis)?))
}

/// How the spectra in an [`EntanglementReport`] were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    /// Dense eigendecomposition of the densified operator.
    Dense,
    /// Bell-basis transform of the coefficients (register too large to densify).
    BellBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub min_eig_state: f64,
    pub min_eig_pt: f64,
    pub is_ppt: bool,
    pub ccnr: f64,
    pub spectrum_state: Vec<f64>,
    pub spectrum_pt: Vec<f64>,
    pub method: SpectrumMethod,
}

pub fn ppt_check(state: &BlochDiagonalState) -> Result<EntanglementReport, StateError> {
    let (mut spectrum_state, mut spectrum_pt, method) = if state.qubits_per_side <= MAX_DENSE_QUBITS_PER_SIDE {
        let rho = state.densify()?;
        let d = state.local_dim();
        let pt = linalg::partial_transpose(&rho, d, d)?;
        (eigh(&rho).eigenvalues, eigh(&pt).eigenvalues, SpectrumMethod::Dense)
    } else {
        (
            state.bell_spectrum(),
            state.partial_transpose().bell_spectrum(),
            SpectrumMethod::BellBasis,
        )
    };
    spectrum_state.sort_by(|a, b| b.total_cmp(a));
    spectrum_pt.sort_by(|a, b| b.total_cmp(a));
    let min_eig_state = *spectrum_state.last().expect("non-empty");
    let min_eig_pt = *spectrum_pt.last().expect("non-empty");
    Ok(EntanglementReport {
        min_eig_state,
        min_eig_pt,
        is_ppt: min_eig_pt >= -PSD_TOL,
        ccnr: state.ccnr(),
        spectrum_state,
        spectrum_pt,
        method,
    })
}

/// Exact `sum_k |lambda_k|` for rational coefficients.
pub fn ccnr_exact(lambdas: &[BigRational]) -> BigRational {
    lambdas.iter().fold(BigRational::zero(), |acc, l| acc + l.abs())
}
