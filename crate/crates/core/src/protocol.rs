//! Strategies and witness evaluation.
//!
//! The witness is
//! `W = 16^{-3N} sum_{x,y,z} w_z(x, y) E_{xyz}` with `E_{xyz}` the expectation
//! of Charlie's binary observable. It is evaluated three ways:
//!
//! * [`witness_brute_force`]: dense expectation for every triple (or a sample)
//! * [`witness_factored`]: products of single-copy expectations, the way the
//!   receiver wires per-copy outcomes together
//! * [`witness_closed_form`]: `4^{-N} sum_k s_k lambda_k` for the Pauli
//!   protocol on a Bloch-diagonal state
//!
//! Exact quantities (separable bound, critical visibility, overhead dimension)
//! are computed with big rationals and only converted at the interface.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigh, kron, ComplexMatrix, HermitianOperator, LinalgError, C64};
use crate::pauli::{
    flat_multi_index, split_multi_index, w_value, InputIndex, PauliString, SignVector, TaskError, INPUTS,
};
use crate::states::{self, BlochDiagonalState, IndexConvention, StateError, StateFile};

/// Tolerance for unitarity and observable spectra.
pub const OPERATOR_TOL: f64 = 1e-10;
/// Triples per partial sum; fixed so reductions do not depend on worker count.
const CHUNK: usize = 256;
/// Largest `N` whose `16^N` coefficient table is summed in closed form.
pub const MAX_CLOSED_FORM_COPIES: usize = 5;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("encoder {index} is not unitary (deviation {deviation:e})")]
    NotUnitary { index: usize, deviation: f64 },
    #[error("decoder {index} has eigenvalue {eigenvalue} outside [-1, 1]")]
    InvalidObservable { index: usize, eigenvalue: f64 },
    #[error("prepared state {index} is not a density matrix: {reason}")]
    InvalidDensity { index: usize, reason: String },
    #[error("task sign at index {index} is {sign} but the state coefficient there is {lambda}")]
    SignMismatch { index: usize, sign: i8, lambda: f64 },
    #[error("full enumeration at N = {0} is too large; supply a sampling plan")]
    NeedsSampling(usize),
    #[error("{0}")]
    Unsupported(String),
}

/// Number of copies `N`, channel dimension `D` and signs `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    n_copies: usize,
    channel_dim: usize,
    signs: SignVector,
}

impl TaskSpec {
    pub fn new(n_copies: usize, channel_dim: usize, signs: SignVector) -> Result<Self, ProtocolError> {
        if n_copies == 0 {
            return Err(ProtocolError::InvalidTask("N must be at least 1".into()));
        }
        let max_dim = 16usize.checked_pow(n_copies as u32);
        if channel_dim == 0 || max_dim.is_some_and(|m| channel_dim > m) {
            return Err(ProtocolError::InvalidTask(format!(
                "channel dimension {channel_dim} outside 1..=16^{n_copies}"
            )));
        }
        if signs.n_copies() != n_copies {
            return Err(ProtocolError::InvalidTask(format!(
                "sign vector covers {} copies, task has {n_copies}",
                signs.n_copies()
            )));
        }
        Ok(Self {
            n_copies,
            channel_dim,
            signs,
        })
    }

    /// The task matched to the bound entangled state: `s = sgn(lambda_BE)` on
    /// every copy, `D = 4^N`.
    pub fn rho_be(n_copies: usize) -> Result<Self, ProtocolError> {
        let per_copy = per_copy_signs(&states::rho_be());
        Self::new(n_copies, 4usize.pow(n_copies as u32), SignVector::product(per_copy, n_copies)?)
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn channel_dim(&self) -> usize {
        self.channel_dim
    }

    pub fn signs(&self) -> &SignVector {
        &self.signs
    }

    pub fn echo(&self) -> TaskEcho {
        let signs = match &self.signs {
            SignVector::Product { per_copy, .. } => SignsEcho::Product {
                per_copy: per_copy.to_vec(),
            },
            SignVector::Full { signs, .. } => SignsEcho::Full { signs: signs.clone() },
        };
        TaskEcho {
            n_copies: self.n_copies,
            channel_dim: self.channel_dim,
            signs,
        }
    }
}

/// Signs `sgn(lambda)` of a single-copy state (`sgn(0) = +1`).
pub fn per_copy_signs(state: &BlochDiagonalState) -> [i8; 16] {
    let mut s = [1i8; 16];
    for (slot, &l) in s.iter_mut().zip(state.lambdas()) {
        *slot = crate::pauli::sign_of(l);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskEcho {
    pub n_copies: usize,
    pub channel_dim: usize,
    pub signs: SignsEcho,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SignsEcho {
    Product { per_copy: Vec<i8> },
    Full { signs: Vec<i8> },
}

/// One input triple `(x, y, z)` of multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub x: Vec<InputIndex>,
    pub y: Vec<InputIndex>,
    pub z: Vec<InputIndex>,
}

impl Triple {
    pub fn single(x: InputIndex, y: InputIndex, z: InputIndex) -> Self {
        Self {
            x: vec![x],
            y: vec![y],
            z: vec![z],
        }
    }

    pub fn n_copies(&self) -> usize {
        self.z.len()
    }
}

/// Seeded uniform sample of triples.
pub fn sample_triples(n_copies: usize, count: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<InputIndex> {
        (0..n_copies)
            .map(|_| InputIndex::new(rng.random_range(0..INPUTS)).expect("in range"))
            .collect()
    };
    (0..count)
        .map(|_| {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let z = draw(&mut rng);
            Triple { x, y, z }
        })
        .collect()
}

/// All `16^{3N}` triples, `z` slowest.
fn all_triples(n_copies: usize) -> impl Iterator<Item = Triple> {
    let m = INPUTS.pow(n_copies as u32);
    (0..m * m * m).map(move |f| Triple {
        z: split_multi_index(f / (m * m), n_copies),
        x: split_multi_index((f / m) % m, n_copies),
        y: split_multi_index(f % m, n_copies),
    })
}

/// Charlie's decoders, one binary observable per `z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    /// `C_z = s_z S^A_z (x) S^B_z` with `S` Hermitian involutions.
    Product {
        signs: Vec<i8>,
        factors_a: Vec<HermitianOperator>,
        factors_b: Vec<HermitianOperator>,
    },
    /// Arbitrary observables on the joint message space.
    General(Vec<HermitianOperator>),
}

/// Which sender's states are being varied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Measurement {
    pub fn len(&self) -> usize {
        match self {
            Self::Product { signs, .. } => signs.len(),
            Self::General(obs) => obs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense joint observable for question `z`.
    pub fn observable(&self, z: usize) -> Result<HermitianOperator, ProtocolError> {
        match self {
            Self::Product {
                signs,
                factors_a,
                factors_b,
            } => Ok(factors_a[z].kron(&factors_b[z])?.scale(signs[z] as f64)),
            Self::General(obs) => Ok(obs[z].clone()),
        }
    }

    /// `tr[(tau_a (x) tau_b) C_z]`.
    pub fn expectation(
        &self,
        z: usize,
        tau_a: &ComplexMatrix,
        tau_b: &ComplexMatrix,
    ) -> Result<f64, ProtocolError> {
        match self {
            Self::Product {
                signs,
                factors_a,
                factors_b,
            } => {
                let ea = tau_a.trace_product(factors_a[z].matrix())?.re;
                let eb = tau_b.trace_product(factors_b[z].matrix())?.re;
                Ok(signs[z] as f64 * ea * eb)
            }
            Self::General(obs) => trace_against_product(tau_a, tau_b, obs[z].matrix()),
        }
    }

    /// Operator `K` on the `side` register with
    /// `tr[(K_side-local) tau] = tr[(tau (x) other) C_z]` (sides ordered A, B).
    pub fn contract(&self, z: usize, side: Side, other: &ComplexMatrix) -> Result<ComplexMatrix, ProtocolError> {
        match self {
            Self::Product {
                signs,
                factors_a,
                factors_b,
            } => {
                let (mine, theirs) = match side {
                    Side::A => (&factors_a[z], &factors_b[z]),
                    Side::B => (&factors_b[z], &factors_a[z]),
                };
                let weight = signs[z] as f64 * other.trace_product(theirs.matrix())?.re;
                Ok(mine.matrix().scale_real(weight))
            }
            Self::General(obs) => partial_contract(obs[z].matrix(), side, other),
        }
    }

    fn validate(&self, dim: usize) -> Result<(), ProtocolError> {
        let check = |index: usize, op: &HermitianOperator, want: usize| -> Result<(), ProtocolError> {
            if op.dim() != want {
                return Err(ProtocolError::DimensionMismatch(format!(
                    "decoder {index} has dimension {}, expected {want}",
                    op.dim()
                )));
            }
            let spec = eigh(op);
            for e in [spec.max(), spec.min()] {
                if e.abs() > 1.0 + OPERATOR_TOL {
                    return Err(ProtocolError::InvalidObservable { index, eigenvalue: e });
                }
            }
            Ok(())
        };
        match self {
            Self::Product {
                signs,
                factors_a,
                factors_b,
            } => {
                if factors_a.len() != signs.len() || factors_b.len() != signs.len() {
                    return Err(ProtocolError::DimensionMismatch("ragged product measurement".into()));
                }
                for (i, (a, b)) in factors_a.iter().zip(factors_b).enumerate() {
                    check(i, a, dim)?;
                    check(i, b, dim)?;
                }
                Ok(())
            }
            Self::General(obs) => obs.iter().enumerate().try_for_each(|(i, o)| check(i, o, dim * dim)),
        }
    }
}

/// `sum A[a,a'] B[b,b'] C[(a' b'), (a b)] = tr[(A (x) B) C]`.
fn trace_against_product(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64, ProtocolError> {
    let (da, db) = (a.rows(), b.rows());
    if c.rows() != da * db || c.cols() != da * db {
        return Err(ProtocolError::DimensionMismatch(format!(
            "observable of dimension {} against {da} x {db}",
            c.rows()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..da {
        for i2 in 0..da {
            let x = a[(i, i2)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for j in 0..db {
                for j2 in 0..db {
                    acc += x * b[(j, j2)] * c[(i2 * db + j2, i * db + j)];
                }
            }
        }
    }
    Ok(acc.re)
}

fn partial_contract(c: &ComplexMatrix, side: Side, other: &ComplexMatrix) -> Result<ComplexMatrix, ProtocolError> {
    let d = other.rows();
    if c.rows() != d * d {
        return Err(ProtocolError::DimensionMismatch(format!(
            "observable of dimension {} against register {d}",
            c.rows()
        )));
    }
    // tr[(tau (x) O) C] = sum tau[a,a'] K[a',a] with K[a',a] = sum O[b,b'] C[(a' b'),(a b)]
    Ok(match side {
        Side::A => ComplexMatrix::from_fn(d, d, |a2, a| {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..d {
                for b2 in 0..d {
                    acc += other[(b, b2)] * c[(a2 * d + b2, a * d + b)];
                }
            }
            acc
        }),
        Side::B => ComplexMatrix::from_fn(d, d, |b2, b| {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..d {
                for a2 in 0..d {
                    acc += other[(a, a2)] * c[(a2 * d + b2, a * d + b)];
                }
            }
            acc
        }),
    })
}

/// Senders prepare states (no shared entanglement).
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedStrategy {
    pub n_copies: usize,
    pub channel_dim: usize,
    pub states_a: Vec<HermitianOperator>,
    pub states_b: Vec<HermitianOperator>,
    pub decoders: Measurement,
}

/// How encoders and decoders of an entangled strategy are specified.
#[derive(Clone, Debug, PartialEq)]
pub enum Encoding {
    /// `U_x = 2^N G_x`, `V_y = 2^N G_y`, `C_z = 4^N G_z (x) G_z`.
    PauliStrings,
    Explicit {
        encoders_a: Vec<ComplexMatrix>,
        encoders_b: Vec<ComplexMatrix>,
        decoders: Vec<HermitianOperator>,
    },
}

/// Senders apply local unitaries to a shared Bloch-diagonal state.
#[derive(Clone, Debug, PartialEq)]
pub struct EntangledStrategy {
    pub n_copies: usize,
    pub state: BlochDiagonalState,
    pub encoding: Encoding,
    dense: HermitianOperator,
}

impl EntangledStrategy {
    pub fn channel_dim(&self) -> usize {
        self.state.local_dim()
    }

    pub fn dense_state(&self) -> &HermitianOperator {
        &self.dense
    }

    pub fn encoder_a(&self, x: &[InputIndex]) -> ComplexMatrix {
        match &self.encoding {
            Encoding::PauliStrings => pauli_encoder(x),
            Encoding::Explicit { encoders_a, .. } => encoders_a[flat_multi_index(x)].clone(),
        }
    }

    pub fn encoder_b(&self, y: &[InputIndex]) -> ComplexMatrix {
        match &self.encoding {
            Encoding::PauliStrings => pauli_encoder(y),
            Encoding::Explicit { encoders_b, .. } => encoders_b[flat_multi_index(y)].clone(),
        }
    }

    pub fn decoder(&self, z: &[InputIndex]) -> ComplexMatrix {
        match &self.encoding {
            Encoding::PauliStrings => {
                let p = pauli_encoder(z);
                kron(&p, &p).expect("decoder below kron cap")
            }
            Encoding::Explicit { decoders, .. } => decoders[flat_multi_index(z)].matrix().clone(),
        }
    }

    fn validate_explicit(&self) -> Result<(), ProtocolError> {
        let Encoding::Explicit {
            encoders_a,
            encoders_b,
            decoders,
        } = &self.encoding
        else {
            return Ok(());
        };
        let inputs = INPUTS.pow(self.n_copies as u32);
        let d = self.channel_dim();
        if encoders_a.len() != inputs || encoders_b.len() != inputs || decoders.len() != inputs {
            return Err(ProtocolError::DimensionMismatch(format!(
                "explicit strategy needs {inputs} encoders per side and {inputs} decoders"
            )));
        }
        for (i, u) in encoders_a.iter().chain(encoders_b).enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(ProtocolError::DimensionMismatch(format!("encoder {i} is not {d}x{d}")));
            }
            let deviation = u.adjoint().matmul(u)?.max_abs_diff(&ComplexMatrix::identity(d));
            if deviation > OPERATOR_TOL {
                return Err(ProtocolError::NotUnitary { index: i, deviation });
            }
        }
        Measurement::General(decoders.clone()).validate(d)
    }
}

fn pauli_encoder(x: &[InputIndex]) -> ComplexMatrix {
    PauliString::from_flat(flat_multi_index(x), 2 * x.len()).unitary()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    Prepared(PreparedStrategy),
    Entangled(EntangledStrategy),
}

impl Strategy {
    pub fn n_copies(&self) -> usize {
        match self {
            Self::Prepared(p) => p.n_copies,
            Self::Entangled(e) => e.n_copies,
        }
    }

    pub fn channel_dim(&self) -> usize {
        match self {
            Self::Prepared(p) => p.channel_dim,
            Self::Entangled(e) => e.channel_dim(),
        }
    }

    /// Checks every structural invariant (densities, unitaries, observables).
    pub fn validate(&self) -> Result<(), ProtocolError> {
        match self {
            Self::Prepared(p) => {
                let inputs = INPUTS.pow(p.n_copies as u32);
                if p.states_a.len() != inputs || p.states_b.len() != inputs || p.decoders.len() != inputs {
                    return Err(ProtocolError::DimensionMismatch(format!(
                        "prepared strategy needs {inputs} states per side and {inputs} decoders"
                    )));
                }
                for (i, tau) in p.states_a.iter().chain(&p.states_b).enumerate() {
                    validate_density(i, tau, p.channel_dim)?;
                }
                p.decoders.validate(p.channel_dim)
            }
            Self::Entangled(e) => e.validate_explicit(),
        }
    }
}

fn validate_density(index: usize, tau: &HermitianOperator, dim: usize) -> Result<(), ProtocolError> {
    if tau.dim() != dim {
        return Err(ProtocolError::InvalidDensity {
            index,
            reason: format!("dimension {} instead of {dim}", tau.dim()),
        });
    }
    if (tau.trace() - 1.0).abs() > OPERATOR_TOL {
        return Err(ProtocolError::InvalidDensity {
            index,
            reason: format!("trace {}", tau.trace()),
        });
    }
    let min = eigh(tau).min();
    if min < -OPERATOR_TOL {
        return Err(ProtocolError::InvalidDensity {
            index,
            reason: format!("eigenvalue {min}"),
        });
    }
    Ok(())
}

/// Pauli-string protocol on a shared Bloch-diagonal state of whole copies.
pub fn be_strategy(state: &BlochDiagonalState) -> Result<Strategy, ProtocolError> {
    let n_copies = state
        .n_copies()
        .ok_or(StateError::NotCopies { qubits: state.qubits_per_side() })?;
    Ok(Strategy::Entangled(EntangledStrategy {
        n_copies,
        state: state.clone(),
        encoding: Encoding::PauliStrings,
        dense: state.densify()?,
    }))
}

pub fn entangled_strategy(
    state: &BlochDiagonalState,
    encoding: Encoding,
) -> Result<Strategy, ProtocolError> {
    let n_copies = state
        .n_copies()
        .ok_or(StateError::NotCopies { qubits: state.qubits_per_side() })?;
    let s = EntangledStrategy {
        n_copies,
        state: state.clone(),
        encoding,
        dense: state.densify()?,
    };
    s.validate_explicit()?;
    Ok(Strategy::Entangled(s))
}

/// Deterministic classical encoding saturating `W = 1/4` at `D = 4`: each
/// qubit of the message is `|0>` for `x~ in {1, 2}` and `|1>` for `x~ in {3, 4}`.
pub fn classical_optimal_strategy_d4() -> Result<Strategy, ProtocolError> {
    classical_optimal_strategy_d4_for(&TaskSpec::rho_be(1)?)
}

pub fn classical_optimal_strategy_d4_for(task: &TaskSpec) -> Result<Strategy, ProtocolError> {
    let qubit = |x: usize| if x < 2 { [1.0, 0.0] } else { [0.0, 1.0] };
    let states: Vec<HermitianOperator> = InputIndex::all()
        .map(|x| {
            let (i, j) = x.digits();
            let (a, b) = (qubit(i), qubit(j));
            HermitianOperator::from_real_diagonal(&[a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
        })
        .collect();
    let decoders = crate::optimize::optimal_measurement(&states, &states, task.signs())?;
    Ok(Strategy::Prepared(PreparedStrategy {
        n_copies: 1,
        channel_dim: 4,
        states_a: states.clone(),
        states_b: states,
        decoders,
    }))
}

/// `E_{xyz}`, the expectation of Charlie's observable.
pub fn expectation(strategy: &Strategy, triple: &Triple) -> Result<f64, ProtocolError> {
    let n = strategy.n_copies();
    if triple.x.len() != n || triple.y.len() != n || triple.z.len() != n {
        return Err(ProtocolError::DimensionMismatch(format!(
            "triple with {} copies against a {n}-copy strategy",
            triple.n_copies()
        )));
    }
    match strategy {
        Strategy::Prepared(p) => {
            let (x, y, z) = (
                flat_multi_index(&triple.x),
                flat_multi_index(&triple.y),
                flat_multi_index(&triple.z),
            );
            p.decoders
                .expectation(z, p.states_a[x].matrix(), p.states_b[y].matrix())
        }
        Strategy::Entangled(e) => {
            let w = kron(&e.encoder_a(&triple.x), &e.encoder_b(&triple.y))?;
            let c = e.decoder(&triple.z);
            // tr[(W rho W^dagger) C] = tr[rho (W^dagger C W)]
            let conj = w.adjoint().matmul(&c)?.matmul(&w)?;
            Ok(e.dense.matrix().trace_product(&conj)?.re)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    BruteForce,
    Factored,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub value: f64,
    pub method: WitnessMethod,
    pub task: TaskEcho,
    /// Number of triples summed (absent for closed forms).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_terms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Which triples a brute-force evaluation sums.
#[derive(Clone, Debug, PartialEq)]
pub enum SamplingPlan {
    /// All `16^{3N}` triples; only allowed for `N = 1`.
    Full,
    /// Average over the supplied triples.
    Triples(Vec<Triple>),
    /// `count` uniformly drawn triples from `seed`.
    Seeded { count: usize, seed: u64 },
}

fn check_compatible(strategy: &Strategy, task: &TaskSpec) -> Result<(), ProtocolError> {
    if strategy.n_copies() != task.n_copies {
        return Err(ProtocolError::DimensionMismatch(format!(
            "strategy has {} copies, task {}",
            strategy.n_copies(),
            task.n_copies
        )));
    }
    if strategy.channel_dim() > task.channel_dim {
        return Err(ProtocolError::DimensionMismatch(format!(
            "strategy sends {}-dimensional messages over a {}-dimensional channel",
            strategy.channel_dim(),
            task.channel_dim
        )));
    }
    Ok(())
}

fn weighted_sum(strategy: &Strategy, task: &TaskSpec, triples: &[Triple]) -> Result<f64, ProtocolError> {
    let partials: Vec<f64> = triples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = 0.0;
            for t in chunk {
                let w = w_value(&t.x, &t.y, &t.z, &task.signs)? as f64;
                acc += w * expectation(strategy, t)?;
            }
            Ok(acc)
        })
        .collect::<Result<_, ProtocolError>>()?;
    Ok(partials.iter().sum())
}

pub fn witness_brute_force(
    strategy: &Strategy,
    task: &TaskSpec,
    plan: &SamplingPlan,
) -> Result<WitnessResult, ProtocolError> {
    check_compatible(strategy, task)?;
    let n = task.n_copies;
    let (value, n_terms, seed) = match plan {
        SamplingPlan::Full => {
            if n != 1 {
                return Err(ProtocolError::NeedsSampling(n));
            }
            let triples: Vec<Triple> = all_triples(1).collect();
            let total = weighted_sum(strategy, task, &triples)?;
            (total / 4096.0, triples.len(), None)
        }
        SamplingPlan::Triples(triples) => {
            if triples.is_empty() {
                return Err(ProtocolError::InvalidTask("empty sampling plan".into()));
            }
            (weighted_sum(strategy, task, triples)? / triples.len() as f64, triples.len(), None)
        }
        SamplingPlan::Seeded { count, seed } => {
            if *count == 0 {
                return Err(ProtocolError::InvalidTask("empty sampling plan".into()));
            }
            let triples = sample_triples(n, *count, *seed);
            (weighted_sum(strategy, task, &triples)? / *count as f64, *count, Some(*seed))
        }
    };
    Ok(WitnessResult {
        value,
        method: WitnessMethod::BruteForce,
        task: task.echo(),
        n_terms: Some(n_terms as u64),
        seed,
    })
}

fn check_signs(state: &BlochDiagonalState, task: &TaskSpec) -> Result<(), ProtocolError> {
    for (k, &l) in state.lambdas().iter().enumerate() {
        if l.abs() > 1e-14 {
            let s = task.signs.sign_flat(k);
            if (s as f64) * l < 0.0 {
                return Err(ProtocolError::SignMismatch { index: k, sign: s, lambda: l });
            }
        }
    }
    Ok(())
}

/// `W = 4^{-N} sum_k s_k lambda_k` for the Pauli protocol with matched signs.
pub fn witness_closed_form(state: &BlochDiagonalState, task: &TaskSpec) -> Result<WitnessResult, ProtocolError> {
    let n = task.n_copies;
    if state.n_copies() != Some(n) {
        return Err(ProtocolError::DimensionMismatch(format!(
            "state on {} qubits per side does not hold {n} copies",
            state.qubits_per_side()
        )));
    }
    if task.channel_dim < state.local_dim() {
        return Err(ProtocolError::DimensionMismatch(format!(
            "protocol sends {}-dimensional messages over a {}-dimensional channel",
            state.local_dim(),
            task.channel_dim
        )));
    }
    check_signs(state, task)?;
    let sum: f64 = state
        .lambdas()
        .iter()
        .enumerate()
        .map(|(k, &l)| task.signs.sign_flat(k) as f64 * l)
        .sum();
    Ok(WitnessResult {
        value: sum / 4f64.powi(n as i32),
        method: WitnessMethod::ClosedForm,
        task: task.echo(),
        n_terms: None,
        seed: None,
    })
}

/// Closed form for a tensor power, without materializing its coefficients:
/// `(sum_k s_k lambda_k / 4)^N` with per-copy signs.
pub fn witness_closed_form_power(copy: &BlochDiagonalState, task: &TaskSpec) -> Result<WitnessResult, ProtocolError> {
    let SignVector::Product { per_copy, .. } = task.signs else {
        return Err(ProtocolError::Unsupported(
            "tensor-power closed form needs per-copy signs".into(),
        ));
    };
    let single = TaskSpec::new(1, 4, SignVector::product(per_copy, 1)?)?;
    let w1 = witness_closed_form(copy, &single)?.value;
    Ok(WitnessResult {
        value: w1.powi(task.n_copies as i32),
        method: WitnessMethod::ClosedForm,
        task: task.echo(),
        n_terms: None,
        seed: None,
    })
}

/// Per-copy expectation table `E[x][y][z]` of the Pauli protocol.
pub struct CopyTable {
    table: Vec<f64>,
}

impl CopyTable {
    pub fn new(copy: &BlochDiagonalState) -> Result<Self, ProtocolError> {
        if copy.n_copies() != Some(1) {
            return Err(ProtocolError::DimensionMismatch(
                "factored evaluation needs a single-copy state".into(),
            ));
        }
        let strategy = be_strategy(copy)?;
        let table = all_triples(1)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(|t| expectation(&strategy, t)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?
            .concat();
        Ok(Self { table })
    }

    pub fn get(&self, x: InputIndex, y: InputIndex, z: InputIndex) -> f64 {
        self.table[z.flat() * 256 + x.flat() * 16 + y.flat()]
    }

    /// Product of per-copy expectations.
    pub fn expectation(&self, t: &Triple) -> f64 {
        (0..t.n_copies()).map(|i| self.get(t.x[i], t.y[i], t.z[i])).product()
    }
}

/// `E_{xyz}` for `N` shared copies as products of single-copy expectations.
pub fn witness_factored(
    copy: &BlochDiagonalState,
    task: &TaskSpec,
    samples: &[Triple],
) -> Result<Vec<f64>, ProtocolError> {
    let table = CopyTable::new(copy)?;
    samples
        .iter()
        .map(|t| {
            if t.n_copies() != task.n_copies {
                return Err(ProtocolError::DimensionMismatch(format!(
                    "triple with {} copies in a {}-copy task",
                    t.n_copies(),
                    task.n_copies
                )));
            }
            Ok(table.expectation(t))
        })
        .collect()
}

/// Exact witness of `N` copies from the factored expectations.
pub fn witness_factored_total(copy: &BlochDiagonalState, task: &TaskSpec) -> Result<WitnessResult, ProtocolError> {
    let table = CopyTable::new(copy)?;
    let value = match &task.signs {
        SignVector::Product { per_copy, .. } => {
            let single = SignVector::product(*per_copy, 1)?;
            let mut w1 = 0.0;
            for t in all_triples(1) {
                w1 += w_value(&t.x, &t.y, &t.z, &single)? as f64 * table.expectation(&t);
            }
            (w1 / 4096.0).powi(task.n_copies as i32)
        }
        SignVector::Full { .. } if task.n_copies <= 2 => {
            let triples: Vec<Triple> = all_triples(task.n_copies).collect();
            let partials: Vec<f64> = triples
                .par_chunks(CHUNK * 16)
                .map(|chunk| {
                    chunk
                        .iter()
                        .map(|t| {
                            w_value(&t.x, &t.y, &t.z, &task.signs).map(|w| w as f64 * table.expectation(t))
                        })
                        .sum::<Result<f64, _>>()
                })
                .collect::<Result<_, _>>()?;
            partials.iter().sum::<f64>() / triples.len() as f64
        }
        SignVector::Full { .. } => return Err(ProtocolError::NeedsSampling(task.n_copies)),
    };
    Ok(WitnessResult {
        value,
        method: WitnessMethod::Factored,
        task: task.echo(),
        n_terms: None,
        seed: None,
    })
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn pow(base: u64, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}

/// Separable bound `D / 16^N`.
pub fn sep_upper_bound(channel_dim: u64, n_copies: usize) -> BigRational {
    ratio(channel_dim, pow(16, n_copies))
}

/// `(4^N - 1) / (6^N - 1)`.
pub fn critical_visibility(n_copies: usize) -> BigRational {
    assert!(n_copies >= 1, "N must be at least 1");
    ratio(pow(4, n_copies) - 1, pow(6, n_copies) - 1)
}

/// Exact single-copy witness `(sum_k s_k lambda_k) / 4` with `s = sgn(lambda)`.
pub fn be_witness_exact(lambdas: &[BigRational]) -> BigRational {
    states::ccnr_exact(lambdas) / BigRational::from_integer(BigInt::from(4))
}

/// Smallest `D` with `D / 16^N >= W_BE^N`, for the bound entangled state.
pub fn overhead_dimension(n_copies: usize) -> Result<u64, ProtocolError> {
    overhead_dimension_for(&states::rho_be_exact(IndexConvention::Standard), n_copies)
}

pub fn overhead_dimension_for(lambdas: &[BigRational], n_copies: usize) -> Result<u64, ProtocolError> {
    if n_copies == 0 {
        return Err(ProtocolError::InvalidTask("N must be at least 1".into()));
    }
    let w = num_traits::pow(be_witness_exact(lambdas), n_copies);
    let needed = (BigRational::from_integer(pow(16, n_copies)) * w).ceil();
    needed
        .to_integer()
        .to_u64()
        .ok_or_else(|| ProtocolError::Unsupported(format!("overhead dimension at N = {n_copies} overflows u64")))
}

/// Visibility solved from `v W_BE + (1 - v) W_mixed = 4^N / 16^N`, with the
/// witness terms evaluated rather than taken from the visibility formula.
///
/// `N = 1` uses brute force for both terms; `N >= 2` uses the factored exact
/// witness of the tensor power and the single-surviving-term rule for the
/// maximally mixed state.
pub fn critical_visibility_numeric(n_copies: usize) -> Result<f64, ProtocolError> {
    let be = states::rho_be();
    let task = TaskSpec::rho_be(n_copies)?;
    let bound = sep_upper_bound(task.channel_dim as u64, n_copies)
        .to_f64()
        .expect("finite");
    let (w_be, w_mixed) = if n_copies == 1 {
        let w_be = witness_brute_force(&be_strategy(&be)?, &task, &SamplingPlan::Full)?.value;
        let mixed = BlochDiagonalState::maximally_mixed(2)?;
        let w_mixed = witness_brute_force(&be_strategy(&mixed)?, &task, &SamplingPlan::Full)?.value;
        (w_be, w_mixed)
    } else {
        let w_be = witness_factored_total(&be, &task)?.value;
        (w_be, mixed_witness(n_copies))
    };
    Ok(solve_visibility(w_be, w_mixed, bound))
}

/// Witness of the maximally mixed `N`-copy state: only `lambda_0 = 4^{-N}`
/// survives, giving `4^{-N} / 4^N`.
pub fn mixed_witness(n_copies: usize) -> f64 {
    1.0 / 16f64.powi(n_copies as i32)
}

/// Solves the affine relation for `v`; returns 1 when the entangled witness
/// does not clear the bound.
pub fn solve_visibility(w_target: f64, w_mixed: f64, bound: f64) -> f64 {
    if w_target <= bound {
        return 1.0;
    }
    ((bound - w_mixed) / (w_target - w_mixed)).clamp(0.0, 1.0)
}

impl From<&BigRational> for RationalEcho {
    fn from(r: &BigRational) -> Self {
        Self {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
            value: r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

/// Exact rational alongside its floating-point value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalEcho {
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
}

pub fn is_one(r: &BigRational) -> bool {
    r.is_one()
}

pub fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}

// ---- serialization ----

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum MeasurementFile {
    Product {
        signs: Vec<i8>,
        a: Vec<HermitianOperator>,
        b: Vec<HermitianOperator>,
    },
    General {
        observables: Vec<HermitianOperator>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyFile {
    PreparedStates {
        n_copies: usize,
        channel_dim: usize,
        states_a: Vec<HermitianOperator>,
        states_b: Vec<HermitianOperator>,
        decoders: MeasurementFile,
    },
    EntangledUnitaries {
        n_copies: usize,
        channel_dim: usize,
        state: StateFile,
        /// `"pauli_strings"` or `"explicit"`.
        encoding: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        encoders_a: Option<Vec<ComplexMatrix>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        encoders_b: Option<Vec<ComplexMatrix>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decoders: Option<MeasurementFile>,
    },
}

impl From<&Measurement> for MeasurementFile {
    fn from(m: &Measurement) -> Self {
        match m {
            Measurement::Product {
                signs,
                factors_a,
                factors_b,
            } => Self::Product {
                signs: signs.clone(),
                a: factors_a.clone(),
                b: factors_b.clone(),
            },
            Measurement::General(obs) => Self::General {
                observables: obs.clone(),
            },
        }
    }
}

impl From<MeasurementFile> for Measurement {
    fn from(m: MeasurementFile) -> Self {
        match m {
            MeasurementFile::Product { signs, a, b } => Self::Product {
                signs,
                factors_a: a,
                factors_b: b,
            },
            MeasurementFile::General { observables } => Self::General(observables),
        }
    }
}

impl Strategy {
    pub fn to_file(&self) -> StrategyFile {
        match self {
            Self::Prepared(p) => StrategyFile::PreparedStates {
                n_copies: p.n_copies,
                channel_dim: p.channel_dim,
                states_a: p.states_a.clone(),
                states_b: p.states_b.clone(),
                decoders: (&p.decoders).into(),
            },
            Self::Entangled(e) => {
                let (encoding, encoders_a, encoders_b, decoders) = match &e.encoding {
                    Encoding::PauliStrings => ("pauli_strings", None, None, None),
                    Encoding::Explicit {
                        encoders_a,
                        encoders_b,
                        decoders,
                    } => (
                        "explicit",
                        Some(encoders_a.clone()),
                        Some(encoders_b.clone()),
                        Some(MeasurementFile::General {
                            observables: decoders.clone(),
                        }),
                    ),
                };
                StrategyFile::EntangledUnitaries {
                    n_copies: e.n_copies,
                    channel_dim: e.channel_dim(),
                    state: e.state.to_json(),
                    encoding: encoding.into(),
                    encoders_a,
                    encoders_b,
                    decoders,
                }
            }
        }
    }

    pub fn from_file(file: StrategyFile) -> Result<Self, ProtocolError> {
        let strategy = match file {
            StrategyFile::PreparedStates {
                n_copies,
                channel_dim,
                states_a,
                states_b,
                decoders,
            } => Strategy::Prepared(PreparedStrategy {
                n_copies,
                channel_dim,
                states_a,
                states_b,
                decoders: decoders.into(),
            }),
            StrategyFile::EntangledUnitaries {
                n_copies,
                channel_dim,
                state,
                encoding,
                encoders_a,
                encoders_b,
                decoders,
            } => {
                let state = BlochDiagonalState::from_json(&state)?;
                if state.n_copies() != Some(n_copies) || state.local_dim() != channel_dim {
                    return Err(ProtocolError::DimensionMismatch(format!(
                        "declared {n_copies} copies / dimension {channel_dim} disagree with the state"
                    )));
                }
                let encoding = match (encoding.as_str(), encoders_a, encoders_b, decoders) {
                    ("pauli_strings", None, None, None) => Encoding::PauliStrings,
                    ("explicit", Some(encoders_a), Some(encoders_b), Some(MeasurementFile::General { observables })) => {
                        Encoding::Explicit {
                            encoders_a,
                            encoders_b,
                            decoders: observables,
                        }
                    }
                    (other, ..) => {
                        return Err(ProtocolError::Unsupported(format!(
                            "entangled strategy encoding {other:?} with mismatched fields"
                        )))
                    }
                };
                return entangled_strategy(&state, encoding);
            }
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{mix_with_white_noise, rho_be, tensor_power};

    fn ix(k: usize) -> InputIndex {
        InputIndex::one_based(k).unwrap()
    }

    #[test]
    fn be_encoders_are_hermitian_unitaries() {
        let Strategy::Entangled(s) = be_strategy(&rho_be()).unwrap() else {
            unreachable!()
        };
        assert_eq!(s.encoder_a(&[ix(1)]), ComplexMatrix::identity(4));
        for x in InputIndex::all() {
            let u = s.encoder_a(&[x]);
            assert!(u.adjoint().matmul(&u).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
            assert!(u.hermitian_deviation() < 1e-15);
        }
        for z in InputIndex::all() {
            let c = HermitianOperator::new(s.decoder(&[z])).unwrap();
            let sq = c.matrix().matmul(c.matrix()).unwrap();
            assert!(sq.max_abs_diff(&ComplexMatrix::identity(16)) < 1e-15);
            let spec = eigh(&c);
            assert!(spec.eigenvalues.iter().all(|e| (e.abs() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn expectation_matches_commutation_formula() {
        // E_xyz = 4 lambda_z f_xz f_yz for the Pauli protocol
        let be = rho_be();
        let strategy = be_strategy(&be).unwrap();
        for (x, y, z) in [(1, 1, 1), (2, 3, 7), (16, 5, 12), (9, 9, 16)] {
            let t = Triple::single(ix(x), ix(y), ix(z));
            let e = expectation(&strategy, &t).unwrap();
            let f = crate::pauli::f_coeff(ix(x), ix(z)) * crate::pauli::f_coeff(ix(y), ix(z));
            assert!((e - 4.0 * be.lambdas()[z - 1] * f as f64).abs() < 1e-14);
        }
        let e111 = expectation(&strategy, &Triple::single(ix(1), ix(1), ix(1))).unwrap();
        assert!((e111 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_gives_zero_for_nontrivial_questions() {
        let mixed = BlochDiagonalState::maximally_mixed(2).unwrap();
        let strategy = be_strategy(&mixed).unwrap();
        for t in sample_triples(1, 200, 4) {
            let e = expectation(&strategy, &t).unwrap();
            if t.z[0].flat() != 0 {
                assert!(e.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn deterministic_classical_states_give_deterministic_outcomes() {
        let zero = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let zz = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        let m = Measurement::Product {
            signs: vec![1],
            factors_a: vec![zz.clone()],
            factors_b: vec![zz],
        };
        assert_eq!(m.expectation(0, zero.matrix(), zero.matrix()).unwrap(), 1.0);
        let dense = m.observable(0).unwrap();
        let general = Measurement::General(vec![dense]);
        assert_eq!(general.expectation(0, zero.matrix(), zero.matrix()).unwrap(), 1.0);
    }

    #[test]
    fn brute_force_values() {
        let task = TaskSpec::rho_be(1).unwrap();
        let w = witness_brute_force(&be_strategy(&rho_be()).unwrap(), &task, &SamplingPlan::Full).unwrap();
        assert!((w.value - 0.375).abs() < 1e-10);
        assert_eq!(w.n_terms, Some(4096));
        let mixed = BlochDiagonalState::maximally_mixed(2).unwrap();
        let w = witness_brute_force(&be_strategy(&mixed).unwrap(), &task, &SamplingPlan::Full).unwrap();
        assert!((w.value - 1.0 / 16.0).abs() < 1e-12);
        let classical = classical_optimal_strategy_d4().unwrap();
        classical.validate().unwrap();
        let w = witness_brute_force(&classical, &task, &SamplingPlan::Full).unwrap();
        assert!((w.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn brute_force_refuses_full_multi_copy_sum() {
        let task = TaskSpec::rho_be(2).unwrap();
        let s = be_strategy(&tensor_power(&rho_be(), 2).unwrap()).unwrap();
        assert!(matches!(
            witness_brute_force(&s, &task, &SamplingPlan::Full),
            Err(ProtocolError::NeedsSampling(2))
        ));
    }

    #[test]
    fn closed_form_values() {
        let be = rho_be();
        let w1 = witness_closed_form(&be, &TaskSpec::rho_be(1).unwrap()).unwrap();
        assert!((w1.value - 0.375).abs() < 1e-15);
        let be2 = tensor_power(&be, 2).unwrap();
        let w2 = witness_closed_form(&be2, &TaskSpec::rho_be(2).unwrap()).unwrap();
        assert!((w2.value - 9.0 / 64.0).abs() < 1e-15);
        let mixed = BlochDiagonalState::maximally_mixed(2).unwrap();
        let wm = witness_closed_form(&mixed, &TaskSpec::rho_be(1).unwrap()).unwrap();
        assert!((wm.value - 1.0 / 16.0).abs() < 1e-15);
        let w4 = witness_closed_form_power(&be, &TaskSpec::rho_be(4).unwrap()).unwrap();
        assert!((w4.value - 0.375f64.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_rejects_sign_mismatch() {
        let task = TaskSpec::new(1, 4, SignVector::all_plus(1)).unwrap();
        match witness_closed_form(&rho_be(), &task) {
            Err(ProtocolError::SignMismatch { index, .. }) => assert_eq!(index, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn critical_noise_hits_the_bound() {
        let noisy = mix_with_white_noise(&rho_be(), 0.6).unwrap();
        let w = witness_closed_form(&noisy, &TaskSpec::rho_be(1).unwrap()).unwrap();
        assert!((w.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn factored_single_copy_equals_expectation() {
        let be = rho_be();
        let task = TaskSpec::rho_be(1).unwrap();
        let samples = sample_triples(1, 50, 1);
        let fact = witness_factored(&be, &task, &samples).unwrap();
        let strategy = be_strategy(&be).unwrap();
        for (t, f) in samples.iter().zip(&fact) {
            assert_eq!(*f, expectation(&strategy, t).unwrap());
        }
    }

    #[test]
    fn factored_three_copies_product_rule() {
        let be = rho_be();
        let task = TaskSpec::rho_be(3).unwrap();
        let ones = Triple {
            x: vec![ix(1); 3],
            y: vec![ix(1); 3],
            z: vec![ix(1); 3],
        };
        let e = witness_factored(&be, &task, &[ones]).unwrap()[0];
        let e1 = expectation(&be_strategy(&be).unwrap(), &Triple::single(ix(1), ix(1), ix(1))).unwrap();
        assert_eq!(e, e1.powi(3));
    }

    #[test]
    fn factored_total_matches_closed_form() {
        let be = rho_be();
        for n in 1..=3 {
            let task = TaskSpec::rho_be(n).unwrap();
            let f = witness_factored_total(&be, &task).unwrap().value;
            assert!((f - 0.375f64.powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_bounds() {
        assert_eq!(sep_upper_bound(4, 1), ratio(1, 4));
        assert_eq!(sep_upper_bound(16, 1), ratio(1, 1));
        for n in 1..6 {
            // (6/16)^N = (3/2)^N / 4^N
            let left = sep_upper_bound(6u64.pow(n as u32), n);
            let right = num_traits::pow(ratio(3, 8), n);
            assert_eq!(left, right);
        }
        assert!(ratio(3, 8) > sep_upper_bound(5, 1));
    }

    #[test]
    fn visibility_values() {
        assert_eq!(critical_visibility(1), ratio(3, 5));
        assert_eq!(critical_visibility(2), ratio(3, 7));
        assert_eq!(critical_visibility(3), ratio(63, 215));
        assert!((critical_visibility_numeric(1).unwrap() - 0.6).abs() < 1e-10);
        assert!((critical_visibility_numeric(2).unwrap() - 3.0 / 7.0).abs() < 1e-10);
        assert!((critical_visibility_numeric(3).unwrap() - 63.0 / 215.0).abs() < 1e-10);
        assert_eq!(solve_visibility(0.25, 1.0 / 16.0, 0.25), 1.0);
    }

    #[test]
    fn overhead_values() {
        assert_eq!(overhead_dimension(1).unwrap(), 6);
        assert_eq!(overhead_dimension(2).unwrap(), 36);
        assert_eq!(overhead_dimension(3).unwrap(), 216);
        assert!(overhead_dimension(0).is_err());
    }

    #[test]
    fn task_validation() {
        assert!(TaskSpec::new(0, 4, SignVector::all_plus(0)).is_err());
        assert!(TaskSpec::new(1, 17, SignVector::all_plus(1)).is_err());
        assert!(TaskSpec::new(1, 0, SignVector::all_plus(1)).is_err());
        assert!(TaskSpec::new(2, 4, SignVector::all_plus(1)).is_err());
        assert!(TaskSpec::new(2, 256, SignVector::all_plus(2)).is_ok());
    }

    #[test]
    fn strategy_json_round_trip() {
        let be = be_strategy(&rho_be()).unwrap();
        let text = serde_json::to_string(&be.to_file()).unwrap();
        assert!(text.contains("\"kind\":\"entangled_unitaries\""));
        let back = Strategy::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, be);

        let classical = classical_optimal_strategy_d4().unwrap();
        let text = serde_json::to_string(&classical.to_file()).unwrap();
        assert!(text.contains("\"kind\":\"prepared_states\""));
        let back = Strategy::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        let task = TaskSpec::rho_be(1).unwrap();
        let w = witness_brute_force(&back, &task, &SamplingPlan::Full).unwrap();
        assert!((w.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn explicit_encoding_validation() {
        let be = rho_be();
        let Strategy::Entangled(pauli) = be_strategy(&be).unwrap() else {
            unreachable!()
        };
        let encoders: Vec<ComplexMatrix> = InputIndex::all().map(|x| pauli.encoder_a(&[x])).collect();
        let decoders: Vec<HermitianOperator> = InputIndex::all()
            .map(|z| HermitianOperator::new(pauli.decoder(&[z])).unwrap())
            .collect();
        let explicit = entangled_strategy(
            &be,
            Encoding::Explicit {
                encoders_a: encoders.clone(),
                encoders_b: encoders.clone(),
                decoders: decoders.clone(),
            },
        )
        .unwrap();
        let task = TaskSpec::rho_be(1).unwrap();
        let w = witness_brute_force(&explicit, &task, &SamplingPlan::Full).unwrap();
        assert!((w.value - 0.375).abs() < 1e-12);

        let mut bad = encoders.clone();
        bad[3] = bad[3].scale_real(2.0);
        assert!(matches!(
            entangled_strategy(
                &be,
                Encoding::Explicit {
                    encoders_a: bad,
                    encoders_b: encoders.clone(),
                    decoders: decoders.clone()
                }
            ),
            Err(ProtocolError::NotUnitary { index: 3, .. })
        ));
        let mut loud = decoders;
        loud[0] = loud[0].scale(1.5);
        assert!(matches!(
            entangled_strategy(
                &be,
                Encoding::Explicit {
                    encoders_a: encoders.clone(),
                    encoders_b: encoders,
                    decoders: loud
                }
            ),
            Err(ProtocolError::InvalidObservable { index: 0, .. })
        ));
    }

    #[test]
    fn brute_force_is_independent_of_worker_count() {
        let task = TaskSpec::rho_be(1).unwrap();
        let s = be_strategy(&rho_be()).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| witness_brute_force(&s, &task, &SamplingPlan::Full).unwrap().value)
        };
        assert_eq!(run(1).to_bits(), run(3).to_bits());
    }
}
