//! Heuristic searches.
//!
//! * [`seesaw_quantum`] alternates the optimal measurement with top-eigenvector
//!   state updates; every half-step is checked to be non-decreasing.
//! * [`seesaw_classical`] restricts messages to computational-basis states
//!   and runs coordinate ascent over the assignments `x -> level`.
//! * [`ccnr_ascent_bloch_ppt`] maximizes `sum |lambda_k|` over PPT
//!   Bloch-diagonal states by projected subgradient ascent.
//!
//! Restarts run in parallel, each with its own ChaCha stream
//! `(seed, restart index)`, and the winner is the first restart attaining the
//! maximum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{eigh, ComplexMatrix, HermitianOperator, C64};
use crate::pauli::{f_product, split_multi_index, SignVector, INPUTS};
use crate::protocol::{Measurement, PreparedStrategy, ProtocolError, Side, Strategy, StrategyFile, TaskSpec};
use crate::states::{bell_eigenvalues, coefficients_from_bell, partial_transpose_coefficients};

/// Largest violation of monotonicity tolerated between half-steps.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Minimum eigenvalue of an accepted CCNR iterate (state and partial transpose).
pub const PPT_ACCEPT_TOL: f64 = -1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub channel_dim: usize,
    pub n_restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Perturbation rounds after each classical local optimum.
    pub kicks: usize,
}

impl SeesawConfig {
    pub fn new(channel_dim: usize) -> Self {
        Self {
            channel_dim,
            n_restarts: 50,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
            kicks: 30,
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !(2..=16).contains(&self.channel_dim) {
            return Err(ProtocolError::InvalidTask(format!(
                "see-saw needs 2 <= D <= 16, got {}",
                self.channel_dim
            )));
        }
        if self.n_restarts == 0 || self.max_iters == 0 {
            return Err(ProtocolError::InvalidTask("restarts and iterations must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ProtocolError::InvalidTask("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcnrConfig {
    pub channel_dim: usize,
    pub n_restarts: usize,
    pub max_steps: usize,
    /// Step `step_scale / sqrt(k)` along `s / D`.
    pub step_scale: f64,
    pub dykstra_cap: usize,
    pub dykstra_tol: f64,
    pub seed: u64,
}

impl CcnrConfig {
    pub fn new(channel_dim: usize) -> Self {
        Self {
            channel_dim,
            n_restarts: 20,
            max_steps: 2000,
            step_scale: 0.1,
            dykstra_cap: 500,
            dykstra_tol: 1e-13,
            seed: 0,
        }
    }

    fn qubits(&self) -> Result<usize, ProtocolError> {
        match self.channel_dim {
            4 => Ok(2),
            8 => Ok(3),
            16 => Ok(4),
            d => Err(ProtocolError::Unsupported(format!(
                "CCNR ascent is defined for D in {{4, 8, 16}} only (Pauli-string product basis); D = {d} has no basis here"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    SeesawQuantum,
    SeesawClassical,
    CcnrAscent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BestPoint {
    Strategy { strategy: StrategyFile },
    Lambdas { qubits_per_side: usize, lambdas: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub kind: ReportKind,
    pub channel_dim: usize,
    pub best_value: f64,
    pub best_restart: usize,
    pub best: BestPoint,
    pub restarts: Vec<RestartSummary>,
    pub converged: bool,
    pub seed: u64,
    pub config: serde_json::Value,
    /// `D / 16` for see-saw runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
}

impl OptimizationReport {
    pub fn monotone(&self) -> bool {
        self.restarts.iter().all(|r| r.monotone)
    }

    /// Restarts whose final value is within `tol` of the best.
    pub fn hits(&self, tol: f64) -> usize {
        self.restarts
            .iter()
            .filter(|r| r.final_value >= self.best_value - tol)
            .count()
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Index of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// `f_{xz}` over multi-indices, row-major `[x][z]`.
fn f_table(n_copies: usize) -> Vec<i8> {
    let m = INPUTS.pow(n_copies as u32);
    let mut t = Vec::with_capacity(m * m);
    for x in 0..m {
        let xs = split_multi_index(x, n_copies);
        for z in 0..m {
            t.push(f_product(&xs, &split_multi_index(z, n_copies)).expect("equal lengths"));
        }
    }
    t
}

/// `O_z = sum_x f_{xz} tau_x` for every `z`.
fn signed_sums(states: &[ComplexMatrix], ftab: &[i8], m: usize) -> Vec<ComplexMatrix> {
    let d = states[0].rows();
    (0..m)
        .map(|z| {
            let mut o = ComplexMatrix::zeros(d, d);
            for (x, tau) in states.iter().enumerate() {
                o.add_scaled(tau, C64::new(ftab[x * m + z] as f64, 0.0)).expect("equal dimensions");
            }
            o
        })
        .collect()
}

fn hermitian_part(m: &ComplexMatrix) -> HermitianOperator {
    let sym = m.add(&m.adjoint()).expect("square").scale_real(0.5);
    HermitianOperator::new(sym).expect("symmetrized")
}

/// `sgn(O)` with zero eigenvalues mapped to `+1`.
fn matrix_sign(o: &ComplexMatrix) -> HermitianOperator {
    let spec = eigh(&hermitian_part(o));
    hermitian_part(&spec.map(|l| if l >= 0.0 { 1.0 } else { -1.0 }))
}

fn check_states(states_a: &[HermitianOperator], states_b: &[HermitianOperator], m: usize) -> Result<usize, ProtocolError> {
    if states_a.len() != m || states_b.len() != m {
        return Err(ProtocolError::DimensionMismatch(format!(
            "expected {m} states per side, got {} and {}",
            states_a.len(),
            states_b.len()
        )));
    }
    let d = states_a[0].dim();
    if states_a.iter().chain(states_b).any(|s| s.dim() != d) {
        return Err(ProtocolError::DimensionMismatch("states of unequal dimension".into()));
    }
    Ok(d)
}

/// `C_z = s_z sgn(O^A_z) (x) sgn(O^B_z)`, the optimal decoders for fixed states.
pub fn optimal_measurement(
    states_a: &[HermitianOperator],
    states_b: &[HermitianOperator],
    signs: &SignVector,
) -> Result<Measurement, ProtocolError> {
    let n = signs.n_copies();
    let m = INPUTS.pow(n as u32);
    check_states(states_a, states_b, m)?;
    let ftab = f_table(n);
    let to_mats = |s: &[HermitianOperator]| s.iter().map(|t| t.matrix().clone()).collect::<Vec<_>>();
    Ok(measurement_from_sums(
        &signed_sums(&to_mats(states_a), &ftab, m),
        &signed_sums(&to_mats(states_b), &ftab, m),
        signs,
    ))
}

fn measurement_from_sums(oa: &[ComplexMatrix], ob: &[ComplexMatrix], signs: &SignVector) -> Measurement {
    Measurement::Product {
        signs: (0..oa.len()).map(|z| signs.sign_flat(z)).collect(),
        factors_a: oa.iter().map(matrix_sign).collect(),
        factors_b: ob.iter().map(matrix_sign).collect(),
    }
}

/// `16^{-3N} sum_z s_z tr[(O^A_z (x) O^B_z) C_z]`.
pub fn separable_value(
    states_a: &[HermitianOperator],
    states_b: &[HermitianOperator],
    decoders: &Measurement,
    signs: &SignVector,
) -> Result<f64, ProtocolError> {
    let n = signs.n_copies();
    let m = INPUTS.pow(n as u32);
    check_states(states_a, states_b, m)?;
    let ftab = f_table(n);
    let to_mats = |s: &[HermitianOperator]| s.iter().map(|t| t.matrix().clone()).collect::<Vec<_>>();
    value_from_sums(
        &signed_sums(&to_mats(states_a), &ftab, m),
        &signed_sums(&to_mats(states_b), &ftab, m),
        decoders,
        signs,
    )
}

fn value_from_sums(
    oa: &[ComplexMatrix],
    ob: &[ComplexMatrix],
    decoders: &Measurement,
    signs: &SignVector,
) -> Result<f64, ProtocolError> {
    let m = oa.len();
    let mut total = 0.0;
    for z in 0..m {
        total += signs.sign_flat(z) as f64 * decoders.expectation(z, &oa[z], &ob[z])?;
    }
    Ok(total / (m * m * m) as f64)
}

/// Best response of one sender: for each `x`, the projector onto the top
/// eigenvector of `A_x = 16^{-3N} sum_z s_z f_{xz} K_z`, where
/// `tr[tau K_z] = tr[(tau (x) O^other_z) C_z]`.
pub fn optimal_states_given_measurement(
    decoders: &Measurement,
    side: Side,
    other_states: &[HermitianOperator],
    signs: &SignVector,
) -> Result<Vec<HermitianOperator>, ProtocolError> {
    let n = signs.n_copies();
    let m = INPUTS.pow(n as u32);
    if other_states.len() != m || decoders.len() != m {
        return Err(ProtocolError::DimensionMismatch(format!(
            "expected {m} states and decoders, got {} and {}",
            other_states.len(),
            decoders.len()
        )));
    }
    let ftab = f_table(n);
    let mats: Vec<ComplexMatrix> = other_states.iter().map(|t| t.matrix().clone()).collect();
    Ok(best_response(decoders, side, &signed_sums(&mats, &ftab, m), signs, &ftab))
}

fn best_response(
    decoders: &Measurement,
    side: Side,
    other_sums: &[ComplexMatrix],
    signs: &SignVector,
    ftab: &[i8],
) -> Vec<HermitianOperator> {
    let m = other_sums.len();
    let k: Vec<ComplexMatrix> = (0..m)
        .map(|z| {
            decoders
                .contract(z, side, &other_sums[z])
                .expect("validated dimensions")
                .scale_real(signs.sign_flat(z) as f64)
        })
        .collect();
    let d = k[0].rows();
    let norm = 1.0 / (m * m * m) as f64;
    (0..m)
        .map(|x| {
            let mut a = ComplexMatrix::zeros(d, d);
            for (z, kz) in k.iter().enumerate() {
                a.add_scaled(kz, C64::new(ftab[x * m + z] as f64 * norm, 0.0)).expect("equal dimensions");
            }
            let spec = eigh(&hermitian_part(&a));
            HermitianOperator::projector(&spec.eigenvector(0))
        })
        .collect()
}

fn seesaw_task() -> SignVector {
    TaskSpec::rho_be(1).expect("valid").signs().clone()
}

struct QuantumRun {
    summary: RestartSummary,
    states_a: Vec<HermitianOperator>,
    states_b: Vec<HermitianOperator>,
    decoders: Measurement,
}

fn quantum_restart(cfg: &SeesawConfig, index: usize, signs: &SignVector, ftab: &[i8]) -> QuantumRun {
    let mut rng = restart_rng(cfg.seed, index);
    let d = cfg.channel_dim;
    let m = INPUTS;
    let mut a: Vec<HermitianOperator> = (0..m).map(|_| crate::random::pure_state(d, &mut rng)).collect();
    let mut b: Vec<HermitianOperator> = (0..m).map(|_| crate::random::pure_state(d, &mut rng)).collect();
    let mats = |s: &[HermitianOperator]| s.iter().map(|t| t.matrix().clone()).collect::<Vec<_>>();

    let mut value = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut converged = false;
    let mut flag = None;
    let mut iterations = 0;
    let mut oa = signed_sums(&mats(&a), ftab, m);
    let mut ob = signed_sums(&mats(&b), ftab, m);
    let mut decoders;

    let guard = |label: &str, before: f64, after: f64, flag: &mut Option<String>| {
        if after < before - MONOTONE_TOL {
            *flag = Some(format!("{label} half-step decreased the witness by {:e}", before - after));
            false
        } else {
            true
        }
    };

    for it in 0..cfg.max_iters {
        iterations = it + 1;
        decoders = measurement_from_sums(&oa, &ob, signs);
        let v1 = value_from_sums(&oa, &ob, &decoders, signs).expect("consistent");
        if !guard("measurement", value, v1, &mut flag) {
            monotone = false;
            break;
        }
        a = best_response(&decoders, Side::A, &ob, signs, ftab);
        oa = signed_sums(&mats(&a), ftab, m);
        let v2 = value_from_sums(&oa, &ob, &decoders, signs).expect("consistent");
        if !guard("A-state", v1, v2, &mut flag) {
            monotone = false;
            break;
        }
        b = best_response(&decoders, Side::B, &oa, signs, ftab);
        ob = signed_sums(&mats(&b), ftab, m);
        let v3 = value_from_sums(&oa, &ob, &decoders, signs).expect("consistent");
        if !guard("B-state", v2, v3, &mut flag) {
            monotone = false;
            break;
        }
        let gain = v3 - value;
        value = v3;
        if gain < cfg.tol {
            converged = true;
            break;
        }
    }
    // final measurement matched to the final states
    decoders = measurement_from_sums(&oa, &ob, signs);
    let final_value = value_from_sums(&oa, &ob, &decoders, signs).expect("consistent");
    QuantumRun {
        summary: RestartSummary {
            index,
            final_value,
            iterations,
            converged,
            monotone,
            flag,
        },
        states_a: a,
        states_b: b,
        decoders,
    }
}

fn seesaw_report(
    kind: ReportKind,
    cfg: &SeesawConfig,
    runs: Vec<QuantumRun>,
) -> OptimizationReport {
    let best_restart = argmax(runs.iter().map(|r| r.summary.final_value));
    let best_value = runs[best_restart].summary.final_value;
    let restarts: Vec<RestartSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let winner = runs.into_iter().nth(best_restart).expect("non-empty");
    let strategy = Strategy::Prepared(PreparedStrategy {
        n_copies: 1,
        channel_dim: cfg.channel_dim,
        states_a: winner.states_a,
        states_b: winner.states_b,
        decoders: winner.decoders,
    });
    OptimizationReport {
        kind,
        channel_dim: cfg.channel_dim,
        best_value,
        best_restart,
        best: BestPoint::Strategy {
            strategy: strategy.to_file(),
        },
        converged: restarts.iter().all(|r| r.converged),
        restarts,
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("plain struct"),
        upper_bound: Some(cfg.channel_dim as f64 / 16.0),
    }
}

/// See-saw over quantum messages of dimension `D`.
pub fn seesaw_quantum(cfg: &SeesawConfig) -> Result<OptimizationReport, ProtocolError> {
    cfg.validate()?;
    let signs = seesaw_task();
    let ftab = f_table(1);
    let runs: Vec<QuantumRun> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|i| quantum_restart(cfg, i, &signs, &ftab))
        .collect();
    Ok(seesaw_report(ReportKind::SeesawQuantum, cfg, runs))
}

/// Deterministic classical encodings `x -> level`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Assignment {
    a: [usize; INPUTS],
    b: [usize; INPUTS],
}

/// `||O_z||_1` for each `z` under one side's assignment.
fn classical_norms(assign: &[usize; INPUTS], d: usize, ftab: &[i8]) -> [i32; INPUTS] {
    let mut out = [0i32; INPUTS];
    let mut levels = vec![0i32; d];
    for (z, slot) in out.iter_mut().enumerate() {
        levels.iter_mut().for_each(|l| *l = 0);
        for (x, &lvl) in assign.iter().enumerate() {
            levels[lvl] += ftab[x * INPUTS + z] as i32;
        }
        *slot = levels.iter().map(|l| l.abs()).sum();
    }
    out
}

/// `16^3 W` as an integer.
fn classical_score(s: &Assignment, d: usize, ftab: &[i8]) -> i64 {
    let na = classical_norms(&s.a, d, ftab);
    let nb = classical_norms(&s.b, d, ftab);
    na.iter().zip(&nb).map(|(&p, &q)| (p * q) as i64).sum()
}

/// One improvement pass on `mine` against fixed `theirs` norms: single
/// reassignments then swaps, first-improvement order.
fn classical_sweep(mine: &mut [usize; INPUTS], theirs: &[i32; INPUTS], d: usize, ftab: &[i8]) -> bool {
    let score = |m: &[usize; INPUTS]| -> i64 {
        classical_norms(m, d, ftab)
            .iter()
            .zip(theirs)
            .map(|(&p, &q)| (p * q) as i64)
            .sum()
    };
    let mut current = score(mine);
    let mut improved = false;
    for x in 0..INPUTS {
        for lvl in 0..d {
            if lvl == mine[x] {
                continue;
            }
            let old = mine[x];
            mine[x] = lvl;
            let v = score(mine);
            if v > current {
                current = v;
                improved = true;
            } else {
                mine[x] = old;
            }
        }
    }
    for x in 0..INPUTS {
        for y in x + 1..INPUTS {
            if mine[x] == mine[y] {
                continue;
            }
            mine.swap(x, y);
            let v = score(mine);
            if v > current {
                current = v;
                improved = true;
            } else {
                mine.swap(x, y);
            }
        }
    }
    improved
}

/// Alternating sweeps to a local optimum; returns the sweeps used.
fn classical_local(s: &mut Assignment, d: usize, ftab: &[i8], cap: usize) -> (usize, bool) {
    for sweep in 0..cap {
        let nb = classical_norms(&s.b, d, ftab);
        let i1 = classical_sweep(&mut s.a, &nb, d, ftab);
        let na = classical_norms(&s.a, d, ftab);
        let i2 = classical_sweep(&mut s.b, &na, d, ftab);
        if !(i1 || i2) {
            return (sweep + 1, true);
        }
    }
    (cap, false)
}

fn classical_restart(cfg: &SeesawConfig, index: usize, ftab: &[i8]) -> (RestartSummary, Assignment) {
    let d = cfg.channel_dim;
    let mut rng = restart_rng(cfg.seed, index);
    let draw = |rng: &mut ChaCha8Rng| -> [usize; INPUTS] { std::array::from_fn(|_| rng.random_range(0..d)) };
    let a = draw(&mut rng);
    let b = draw(&mut rng);
    let mut current = Assignment { a, b };
    let (mut iterations, mut converged) = classical_local(&mut current, d, ftab, cfg.max_iters);
    let mut score = classical_score(&current, d, ftab);
    let mut monotone = true;
    for _ in 0..cfg.kicks {
        let mut trial = current.clone();
        for _ in 0..3 {
            let (xa, la) = (rng.random_range(0..INPUTS), rng.random_range(0..d));
            let (xb, lb) = (rng.random_range(0..INPUTS), rng.random_range(0..d));
            trial.a[xa] = la;
            trial.b[xb] = lb;
        }
        let (used, conv) = classical_local(&mut trial, d, ftab, cfg.max_iters);
        iterations += used;
        let s = classical_score(&trial, d, ftab);
        if s >= score {
            current = trial;
            converged = conv;
            score = s;
        }
    }
    let final_score = classical_score(&current, d, ftab);
    monotone &= final_score >= score;
    (
        RestartSummary {
            index,
            final_value: final_score as f64 / 4096.0,
            iterations,
            converged,
            monotone,
            flag: None,
        },
        current,
    )
}

fn computational_state(d: usize, level: usize) -> HermitianOperator {
    let mut diag = vec![0.0; d];
    diag[level] = 1.0;
    HermitianOperator::from_real_diagonal(&diag)
}

/// See-saw over classical (computational-basis) messages of dimension `D`.
///
/// The measurement half-step is [`optimal_measurement`]; the state half-step
/// is local search over assignments because the feasible set is discrete.
pub fn seesaw_classical(cfg: &SeesawConfig) -> Result<OptimizationReport, ProtocolError> {
    cfg.validate()?;
    let signs = seesaw_task();
    let ftab = f_table(1);
    let d = cfg.channel_dim;
    let results: Vec<(RestartSummary, Assignment)> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|i| classical_restart(cfg, i, &ftab))
        .collect();
    let runs = results
        .into_iter()
        .map(|(mut summary, assign)| {
            let states_a: Vec<HermitianOperator> = assign.a.iter().map(|&l| computational_state(d, l)).collect();
            let states_b: Vec<HermitianOperator> = assign.b.iter().map(|&l| computational_state(d, l)).collect();
            let decoders = optimal_measurement(&states_a, &states_b, &signs)?;
            let w = separable_value(&states_a, &states_b, &decoders, &signs)?;
            if (w - summary.final_value).abs() > 1e-12 {
                summary.flag = Some(format!(
                    "measurement value {w} disagrees with assignment score {}",
                    summary.final_value
                ));
            }
            summary.final_value = w;
            Ok(QuantumRun {
                summary,
                states_a,
                states_b,
                decoders,
            })
        })
        .collect::<Result<Vec<_>, ProtocolError>>()?;
    Ok(seesaw_report(ReportKind::SeesawClassical, cfg, runs))
}

/// Projections used by the CCNR ascent, all in coefficient space where the
/// Bell transform is an isometry.
struct PptProjector {
    qubits: usize,
    dim: usize,
    cap: usize,
    tol: f64,
    transpose_signs: Vec<f64>,
}

impl PptProjector {
    fn new(qubits: usize, cap: usize, tol: f64) -> Self {
        let dim = 1 << qubits;
        Self {
            qubits,
            dim,
            cap,
            tol,
            transpose_signs: partial_transpose_coefficients(&vec![1.0; dim * dim], qubits),
        }
    }

    fn transpose(&self, l: &[f64]) -> Vec<f64> {
        l.iter().zip(&self.transpose_signs).map(|(a, t)| a * t).collect()
    }

    fn clip_state(&self, l: &[f64]) -> Vec<f64> {
        let mu: Vec<f64> = bell_eigenvalues(l, self.qubits).into_iter().map(|e| e.max(0.0)).collect();
        coefficients_from_bell(&mu, self.qubits)
    }

    fn clip_transpose(&self, l: &[f64]) -> Vec<f64> {
        self.transpose(&self.clip_state(&self.transpose(l)))
    }

    fn fix_trace(&self, l: &[f64]) -> Vec<f64> {
        let mut out = l.to_vec();
        out[0] = 1.0 / self.dim as f64;
        out
    }

    /// Dykstra's alternating projections; `false` if the cap was hit.
    fn project(&self, start: &[f64]) -> (Vec<f64>, bool) {
        let mut x = start.to_vec();
        let mut p = vec![vec![0.0; x.len()]; 3];
        for _ in 0..self.cap {
            let old = x.clone();
            for (i, inc) in p.iter_mut().enumerate() {
                let shifted: Vec<f64> = x.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
                let y = match i {
                    0 => self.clip_state(&shifted),
                    1 => self.clip_transpose(&shifted),
                    _ => self.fix_trace(&shifted),
                };
                for ((q, s), yy) in inc.iter_mut().zip(&shifted).zip(&y) {
                    *q = s - yy;
                }
                x = y;
            }
            let change = x.iter().zip(&old).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if change < self.tol {
                return (x, true);
            }
        }
        (x, false)
    }

    fn min_eigenvalues(&self, l: &[f64]) -> (f64, f64) {
        let min = |v: Vec<f64>| v.into_iter().fold(f64::INFINITY, f64::min);
        (
            min(bell_eigenvalues(l, self.qubits)),
            min(bell_eigenvalues(&self.transpose(l), self.qubits)),
        )
    }
}

fn ccnr_restart(cfg: &CcnrConfig, proj: &PptProjector, index: usize) -> (RestartSummary, Vec<f64>) {
    let mut rng = restart_rng(cfg.seed, index);
    let d = proj.dim as f64;
    let mut l: Vec<f64> = (0..proj.dim * proj.dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal) / d)
        .collect();
    l[0] = 1.0 / d;
    let (start, mut all_converged) = proj.project(&l);
    l = start;

    let mut best = (f64::NEG_INFINITY, l.clone());
    let accept = |l: &[f64], best: &mut (f64, Vec<f64>)| {
        let (a, b) = proj.min_eigenvalues(l);
        if a >= PPT_ACCEPT_TOL && b >= PPT_ACCEPT_TOL {
            let v: f64 = l.iter().map(|x| x.abs()).sum();
            if v > best.0 {
                *best = (v, l.to_vec());
            }
        }
    };
    accept(&l, &mut best);
    let mut capped = 0usize;
    for k in 1..=cfg.max_steps {
        let eta = cfg.step_scale / (k as f64).sqrt() / d;
        let stepped: Vec<f64> = l.iter().map(|&x| x + if x >= 0.0 { eta } else { -eta }).collect();
        let (next, ok) = proj.project(&stepped);
        if !ok {
            capped += 1;
            all_converged = false;
        }
        l = next;
        accept(&l, &mut best);
    }
    let flag = (capped > 0).then(|| format!("Dykstra hit the iteration cap in {capped} steps"));
    if best.0 == f64::NEG_INFINITY {
        best.0 = 0.0;
    }
    (
        RestartSummary {
            index,
            final_value: best.0,
            iterations: cfg.max_steps,
            converged: all_converged,
            monotone: true,
            flag,
        },
        best.1,
    )
}

/// Maximizes the CCNR value `sum |lambda_k|` over PPT Bloch-diagonal states
/// on `C^D (x) C^D`, `D in {4, 8, 16}`.
///
/// Each step moves along `s / D` with `s = sgn(lambda)` and projects back onto
/// `{rho >= 0} n {rho^{T_B} >= 0} n {lambda_0 = 1/D}` by Dykstra's method. The
/// eigen-clipping happens in the Bell basis, which diagonalizes every
/// Bloch-diagonal operator exactly. Only iterates whose state and partial
/// transpose have minimum eigenvalue at least `-1e-8` count.
pub fn ccnr_ascent_bloch_ppt(cfg: &CcnrConfig) -> Result<OptimizationReport, ProtocolError> {
    let qubits = cfg.qubits()?;
    if cfg.n_restarts == 0 || cfg.max_steps == 0 || cfg.dykstra_cap == 0 {
        return Err(ProtocolError::InvalidTask("restarts, steps and Dykstra cap must be positive".into()));
    }
    let proj = PptProjector::new(qubits, cfg.dykstra_cap, cfg.dykstra_tol);
    let runs: Vec<(RestartSummary, Vec<f64>)> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|i| ccnr_restart(cfg, &proj, i))
        .collect();
    let best_restart = argmax(runs.iter().map(|r| r.0.final_value));
    let restarts: Vec<RestartSummary> = runs.iter().map(|r| r.0.clone()).collect();
    let (summary, lambdas) = runs.into_iter().nth(best_restart).expect("non-empty");
    Ok(OptimizationReport {
        kind: ReportKind::CcnrAscent,
        channel_dim: cfg.channel_dim,
        best_value: summary.final_value,
        best_restart,
        best: BestPoint::Lambdas {
            qubits_per_side: qubits,
            lambdas,
        },
        converged: restarts.iter().all(|r| r.converged),
        restarts,
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("plain struct"),
        upper_bound: None,
    })
}
