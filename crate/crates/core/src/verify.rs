//! Reproduction checklist.
//!
//! Eleven checks cover the state construction, CCNR value, witness values,
//! exact bounds, the multi-copy factorization and the heuristic searches.
//! [`VerifyOptions`] can swap in a different index convention or corrupt the
//! coefficient signs; both should make the state checks fail.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::optimize::{ccnr_ascent_bloch_ppt, seesaw_classical, seesaw_quantum, CcnrConfig, SeesawConfig, PPT_ACCEPT_TOL};
use crate::pauli::{m_matrix, PauliBasis};
use crate::protocol::{
    be_strategy, classical_optimal_strategy_d4, critical_visibility, critical_visibility_numeric, expectation,
    overhead_dimension, sample_triples, witness_brute_force, witness_closed_form, witness_factored, SamplingPlan,
    TaskSpec,
};
use crate::random;
use crate::states::{self, ccnr_dense, certify_rho_be_lambdas, tensor_power, BlochDiagonalState, IndexConvention};

pub const CHECK_COUNT: u8 = 11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub convention: IndexConvention,
    /// Flips the sign of the coefficient at label 7.
    pub corrupt_signs: bool,
    pub seed: u64,
    /// Fresh-seed retries for the CCNR ascent check.
    pub ccnr_retries: usize,
    /// Restrict to these check ids (all when `None`).
    pub only: Option<Vec<u8>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            convention: IndexConvention::Standard,
            corrupt_signs: false,
            seed: 0,
            ccnr_retries: 3,
            only: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const CHECK_NAMES: [&str; 11] = [
    "state spectrum and partial transpose",
    "CCNR value",
    "brute-force witness",
    "separable saturation",
    "M-matrix identity",
    "critical visibility",
    "overhead dimension",
    "multi-copy factorization",
    "see-saw soundness and saturation",
    "CCNR ascent",
    "sampling properties",
];

/// The state under test after applying the convention and corruption options.
pub fn state_under_test(opts: &VerifyOptions) -> Result<BlochDiagonalState, String> {
    let base = states::rho_be_with(opts.convention).map_err(|e| e.to_string())?;
    if !opts.corrupt_signs {
        return Ok(base);
    }
    let mut l = base.lambdas().to_vec();
    l[6] = -l[6];
    BlochDiagonalState::new_unvalidated(2, l).map_err(|e| e.to_string())
}

pub fn run_checklist(opts: &VerifyOptions) -> Vec<CheckResult> {
    (1..=CHECK_COUNT)
        .filter(|id| opts.only.as_ref().is_none_or(|o| o.contains(id)))
        .map(|id| run_check(id, opts))
        .collect()
}

pub fn run_check(id: u8, opts: &VerifyOptions) -> CheckResult {
    let start = Instant::now();
    let outcome = match id {
        1 => check_spectrum(opts),
        2 => check_ccnr(opts),
        3 => check_brute_force(opts),
        4 => check_saturation(),
        5 => check_m_matrix(),
        6 => check_visibility(),
        7 => check_overhead(),
        8 => check_factorization(opts),
        9 => check_seesaw(opts),
        10 => check_ccnr_ascent(opts),
        11 => check_sampling(opts),
        _ => Err(format!("unknown check {id}")),
    };
    let (passed, detail) = match outcome {
        Ok((passed, detail)) => (passed, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        id,
        name: CHECK_NAMES.get(id as usize - 1).unwrap_or(&"unknown").to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn check_spectrum(opts: &VerifyOptions) -> Outcome {
    let state = state_under_test(opts)?;
    Ok(match certify_rho_be_lambdas(state) {
        Ok(r) => (
            r.is_ppt,
            format!("both spectra (1/6 x6, 0 x10); min eigenvalues {:.2e}, {:.2e}", r.min_eig_state, r.min_eig_pt),
        ),
        Err(e) => (false, e.to_string()),
    })
}

fn check_ccnr(opts: &VerifyOptions) -> Outcome {
    let state = state_under_test(opts)?;
    let fast = state.ccnr();
    let dense = ccnr_dense(&state.densify().map_err(err)?, &PauliBasis::new(2).map_err(err)?).map_err(err)?;
    let passed = (fast - 1.5).abs() <= 1e-10 && (dense - 1.5).abs() <= 1e-10;
    Ok((passed, format!("sum |lambda| = {fast:.12}, realignment trace norm = {dense:.12}")))
}

fn check_brute_force(opts: &VerifyOptions) -> Outcome {
    let state = state_under_test(opts)?;
    let task = TaskSpec::rho_be(1).map_err(err)?;
    let w = witness_brute_force(&be_strategy(&state).map_err(err)?, &task, &SamplingPlan::Full)
        .map_err(err)?
        .value;
    let closed = witness_closed_form(&states::rho_be(), &task).map_err(err)?.value;
    let passed = (w - 0.375).abs() <= 1e-10 && (closed - 0.375).abs() <= 1e-10;
    Ok((passed, format!("W = {w:.12} over 4096 triples (closed form {closed:.12})")))
}

fn check_saturation() -> Outcome {
    let task = TaskSpec::rho_be(1).map_err(err)?;
    let w = witness_brute_force(&classical_optimal_strategy_d4().map_err(err)?, &task, &SamplingPlan::Full)
        .map_err(err)?
        .value;
    Ok(((w - 0.25).abs() <= 1e-12, format!("W = {w:.15}")))
}

fn check_m_matrix() -> Outcome {
    let m1 = m_matrix(1).map_err(err)?;
    let m2 = m_matrix(2).map_err(err)?;
    let passed = m1.is_scaled_identity(16) && m2.is_scaled_identity(256);
    Ok((passed, format!("M(1) = 16 I: {}, M(2) = 256 I: {}", m1.is_scaled_identity(16), m2.is_scaled_identity(256))))
}

fn check_visibility() -> Outcome {
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let exact_ok = critical_visibility(1) == r(3, 5) && critical_visibility(2) == r(3, 7);
    let mut details = vec![format!("exact values 3/5, 3/7: {exact_ok}")];
    let mut passed = exact_ok;
    for n in 1..=2 {
        let numeric = critical_visibility_numeric(n).map_err(err)?;
        let exact = critical_visibility(n).to_f64().ok_or("non-finite")?;
        passed &= (numeric - exact).abs() <= 1e-10;
        details.push(format!("numeric N={n}: {numeric:.12}"));
    }
    Ok((passed, details.join(", ")))
}

fn check_overhead() -> Outcome {
    let mut passed = true;
    let mut got = Vec::new();
    for n in 1..=6 {
        let d = overhead_dimension(n).map_err(err)?;
        passed &= d == 6u64.pow(n as u32);
        got.push(d.to_string());
    }
    Ok((passed, format!("D = [{}]", got.join(", "))))
}

fn check_factorization(opts: &VerifyOptions) -> Outcome {
    let state = state_under_test(opts)?;
    let two = tensor_power(&state, 2).map_err(err)?;
    let strategy = be_strategy(&two).map_err(err)?;
    let task = TaskSpec::rho_be(2).map_err(err)?;
    let triples = sample_triples(2, 10_000, opts.seed);
    let factored = witness_factored(&state, &task, &triples).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (t, f) in triples.iter().zip(&factored) {
        worst = worst.max((expectation(&strategy, t).map_err(err)? - f).abs());
    }
    Ok((worst <= 1e-10, format!("max |dense - factored| = {worst:.2e} over 10^4 triples")))
}

fn check_seesaw(opts: &VerifyOptions) -> Outcome {
    let mut passed = true;
    let mut details = Vec::new();
    for d in [4usize, 16] {
        let mut cfg = SeesawConfig::new(d);
        cfg.seed = opts.seed;
        let bound = d as f64 / 16.0;
        for (label, report) in [
            ("classical", seesaw_classical(&cfg).map_err(err)?),
            ("quantum", seesaw_quantum(&cfg).map_err(err)?),
        ] {
            let max_final = report.restarts.iter().map(|r| r.final_value).fold(f64::MIN, f64::max);
            let ok = report.best_value >= bound - 1e-6 && max_final <= bound + 1e-9 && report.monotone();
            passed &= ok;
            details.push(format!("{label} D={d}: {:.9}", report.best_value));
        }
    }
    Ok((passed, details.join(", ")))
}

fn check_ccnr_ascent(opts: &VerifyOptions) -> Outcome {
    let targets = [(4usize, 1.499), (8, 1.69), (16, 2.24)];
    let mut details = Vec::new();
    for attempt in 0..=opts.ccnr_retries {
        details.clear();
        let mut passed = true;
        for (d, target) in targets {
            let mut cfg = CcnrConfig::new(d);
            cfg.seed = opts.seed + attempt as u64;
            let report = ccnr_ascent_bloch_ppt(&cfg).map_err(err)?;
            let ppt = match &report.best {
                crate::optimize::BestPoint::Lambdas { qubits_per_side, lambdas } => {
                    let s = BlochDiagonalState::new_unvalidated(*qubits_per_side, lambdas.clone()).map_err(err)?;
                    s.min_eigenvalue() >= PPT_ACCEPT_TOL && s.partial_transpose().min_eigenvalue() >= PPT_ACCEPT_TOL
                }
                _ => false,
            };
            passed &= ppt && report.best_value >= target;
            details.push(format!("D={d}: {:.6}", report.best_value));
        }
        if passed {
            return Ok((true, format!("{} (seed {})", details.join(", "), opts.seed + attempt as u64)));
        }
    }
    Ok((false, format!("{} after {} retries", details.join(", "), opts.ccnr_retries)))
}

fn check_sampling(opts: &VerifyOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let task = TaskSpec::rho_be(1).map_err(err)?;
    let mut worst_w = f64::MIN;
    for i in 0..500 {
        let s = if i % 2 == 0 {
            random::product_strategy(4, &mut rng)
        } else {
            random::product_strategy_optimal(4, task.signs(), &mut rng)
        };
        worst_w = worst_w.max(witness_brute_force(&s, &task, &SamplingPlan::Full).map_err(err)?.value);
    }
    let basis = PauliBasis::new(2).map_err(err)?;
    let mut worst_c = f64::MIN;
    for i in 0..500 {
        let rho = random::separable_state(4, 1 + i % 6, &mut rng);
        worst_c = worst_c.max(ccnr_dense(&rho, &basis).map_err(err)?);
    }
    Ok((
        worst_w <= 0.25 + 1e-9 && worst_c <= 1.0 + 1e-9,
        format!("max separable W = {worst_w:.9}, max separable CCNR = {worst_c:.9}"),
    ))
}
