//! Batch commands behind the `boundent` binary.
//!
//! ```text
//! boundent state-info [rho_be | FILE] [--visibility V]
//! boundent witness [--strategy be|classical-optimal|FILE] [--copies N] [--method brute|factored|closed]
//! boundent scaling [--n-max N]
//! boundent seesaw --kind classical|quantum --dim D
//! boundent ccnr-search --dim 4|8|16
//! boundent verify [--convention standard|swapped|zero-based] [--corrupt-signs]
//! ```
//!
//! Every command accepts `--seed`, `--out`, `--format json|csv` and
//! `--workers`. Exit status is 0 on success, 1 when a verification fails and
//! 2 for usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::optimize::{
    ccnr_ascent_bloch_ppt, seesaw_classical, seesaw_quantum, CcnrConfig, OptimizationReport, SeesawConfig,
};
use crate::pauli::{SignVector, PauliBasis};
use crate::protocol::{
    be_strategy, classical_optimal_strategy_d4, critical_visibility, overhead_dimension, sep_upper_bound,
    witness_brute_force, witness_closed_form, witness_closed_form_power, witness_factored_total, ProtocolError,
    SamplingPlan, Strategy, StrategyFile, TaskSpec, WitnessResult, MAX_CLOSED_FORM_COPIES,
};
use crate::states::{
    ccnr_dense, mix_with_white_noise, ppt_check, rho_be, tensor_power, BlochDiagonalState, IndexConvention,
    StateFile, MAX_DENSE_QUBITS_PER_SIDE,
};
use crate::verify::{run_checklist, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "boundent", version, about = "Bound-entanglement communication witnesses")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Factored,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Classical,
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Standard,
    Swapped,
    ZeroBased,
}

impl From<ConventionArg> for IndexConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Standard => Self::Standard,
            ConventionArg::Swapped => Self::Swapped,
            ConventionArg::ZeroBased => Self::ZeroBased,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectra, PPT flag and CCNR value of a state.
    StateInfo {
        /// `rho_be` or a state JSON file.
        #[arg(default_value = "rho_be")]
        source: String,
        /// Mix with white noise at this visibility.
        #[arg(long)]
        visibility: Option<f64>,
    },
    /// Evaluates the witness for a strategy.
    Witness {
        /// `be`, `classical-optimal` or a strategy JSON file.
        #[arg(long, default_value = "be")]
        strategy: String,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Defaults to brute force for one copy and factored otherwise.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Triples sampled by brute force beyond one copy.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Visibility of the shared state for the `be` strategy.
        #[arg(long)]
        visibility: Option<f64>,
    },
    /// Witness, separable bound, overhead and critical visibility per copy count.
    Scaling {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// See-saw lower bound on the separable witness.
    Seesaw {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Perturbation rounds per classical restart.
        #[arg(long)]
        kicks: Option<usize>,
        /// Append a one-line CSV summary to this file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Projected ascent of the CCNR value over PPT Bloch-diagonal states.
    CcnrSearch {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Runs the reproduction checklist.
    Verify {
        #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
        convention: ConventionArg,
        /// Flip one coefficient sign of the state (negative control).
        #[arg(long)]
        corrupt_signs: bool,
        /// Only run these checks (comma separated ids).
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<u8>>,
        #[arg(long, default_value_t = 3)]
        retries: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Failure(m) => f.write_str(m),
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::InvalidTask(_)
            | ProtocolError::Unsupported(_)
            | ProtocolError::NeedsSampling(_)
            | ProtocolError::DimensionMismatch(_)
            | ProtocolError::State(_)
            | ProtocolError::NotUnitary { .. }
            | ProtocolError::InvalidObservable { .. }
            | ProtocolError::InvalidDensity { .. }
            | ProtocolError::SignMismatch { .. } => Self::Usage(e.to_string()),
            other => Self::Failure(other.to_string()),
        }
    }
}

impl From<crate::states::StateError> for CliError {
    fn from(e: crate::states::StateError) -> Self {
        Self::Usage(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("boundent: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::StateInfo { source, visibility } => {
            let out = state_info(source, *visibility)?;
            emit(c, &out.json, &out.csv)?;
            Ok(EXIT_OK)
        }
        Command::Witness {
            strategy,
            copies,
            method,
            samples,
            visibility,
        } => {
            let result = witness(strategy, *copies, *method, *samples, *visibility, c.seed)?;
            let csv = table(
                &["value", "method", "n_copies", "channel_dim", "n_terms", "seed"],
                &[vec![
                    fmt_f64(result.value),
                    serde_json::to_value(result.method)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default(),
                    result.task.n_copies.to_string(),
                    result.task.channel_dim.to_string(),
                    result.n_terms.map(|n| n.to_string()).unwrap_or_default(),
                    c.seed.to_string(),
                ]],
            );
            emit(c, &to_json(&result), &csv)?;
            Ok(EXIT_OK)
        }
        Command::Scaling { n_max } => {
            let rows = scaling_rows(*n_max)?;
            let header = ["N", "W_BE", "sep_bound_4n", "overhead_dim", "v_crit"];
            let csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.w_be.clone(),
                        r.sep_bound_4n.clone(),
                        r.overhead_dim.to_string(),
                        r.v_crit.clone(),
                    ]
                })
                .collect();
            let json = json!({ "seed": c.seed, "rows": rows });
            emit(c, &to_json(&json), &table(&header, &csv_rows))?;
            Ok(EXIT_OK)
        }
        Command::Seesaw {
            kind,
            dim,
            restarts,
            iters,
            tol,
            kicks,
            summary,
        } => {
            let mut cfg = SeesawConfig::new(*dim);
            cfg.seed = c.seed;
            if let Some(r) = restarts {
                cfg.n_restarts = *r;
            }
            if let Some(i) = iters {
                cfg.max_iters = *i;
            }
            if let Some(t) = tol {
                cfg.tol = *t;
            }
            if let Some(k) = kicks {
                cfg.kicks = *k;
            }
            let report = match kind {
                Kind::Classical => seesaw_classical(&cfg)?,
                Kind::Quantum => seesaw_quantum(&cfg)?,
            };
            emit_report(c, &report, summary.as_deref())?;
            Ok(if report.monotone() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::CcnrSearch {
            dim,
            restarts,
            steps,
            summary,
        } => {
            let mut cfg = CcnrConfig::new(*dim);
            cfg.seed = c.seed;
            if let Some(r) = restarts {
                cfg.n_restarts = *r;
            }
            if let Some(s) = steps {
                cfg.max_steps = *s;
            }
            let report = ccnr_ascent_bloch_ppt(&cfg)?;
            emit_report(c, &report, summary.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            convention,
            corrupt_signs,
            checks,
            retries,
        } => {
            let opts = VerifyOptions {
                convention: (*convention).into(),
                corrupt_signs: *corrupt_signs,
                seed: c.seed,
                ccnr_retries: *retries,
                only: checks.clone(),
            };
            if let Some(bad) = checks.iter().flatten().find(|&&id| id == 0 || id > crate::verify::CHECK_COUNT) {
                return Err(CliError::Usage(format!("no check with id {bad}")));
            }
            let results = run_checklist(&opts);
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} checks passed", results.len() - failed, results.len());
            if c.out.is_some() {
                let rows: Vec<Vec<String>> = results
                    .iter()
                    .map(|r| {
                        vec![
                            r.id.to_string(),
                            r.name.clone(),
                            r.passed.to_string(),
                            format!("{:.3}", r.seconds),
                            r.detail.clone(),
                        ]
                    })
                    .collect();
                let json = json!({ "seed": c.seed, "checks": results });
                emit(c, &to_json(&json), &table(&["id", "name", "passed", "seconds", "detail"], &rows))?;
            }
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

struct Rendered {
    json: String,
    csv: String,
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn emit(c: &CommonArgs, json: &str, csv: &str) -> Result<(), CliError> {
    let body = match c.format {
        Format::Json => json,
        Format::Csv => csv,
    };
    match &c.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Failure(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Failure(format!("stdout: {e}")))
        }
    }
}

/// Header plus rows, quoting fields through the csv crate.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory");
    for r in rows {
        w.write_record(r).expect("in-memory");
    }
    String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
}

/// Shortest round-trip decimal.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// `x` rounded to `digits` significant digits, trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-7..=15).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1;
    let mut s = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits_only)
    } else if point as usize >= digits_only.len() {
        format!("{}{}", digits_only, "0".repeat(point as usize - digits_only.len()))
    } else {
        let (a, b) = digits_only.split_at(point as usize);
        format!("{a}.{b}")
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

fn rational_12(r: &BigRational) -> String {
    format_significant(r.to_f64().unwrap_or(f64::NAN), 12)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub w_be: String,
    pub w_be_exact: String,
    pub sep_bound_4n: String,
    pub sep_bound_4n_exact: String,
    pub overhead_dim: u64,
    pub v_crit: String,
    pub v_crit_exact: String,
}

pub fn scaling_rows(n_max: usize) -> Result<Vec<ScalingRow>, CliError> {
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let per_copy = crate::protocol::be_witness_exact(&crate::states::rho_be_exact(IndexConvention::Standard));
    (1..=n_max)
        .map(|n| {
            let w = num_traits::pow(per_copy.clone(), n);
            let bound = sep_upper_bound(4u64.pow(n as u32), n);
            let v = critical_visibility(n);
            Ok(ScalingRow {
                n,
                w_be: rational_12(&w),
                w_be_exact: w.to_string(),
                sep_bound_4n: rational_12(&bound),
                sep_bound_4n_exact: bound.to_string(),
                overhead_dim: overhead_dimension(n)?,
                v_crit: rational_12(&v),
                v_crit_exact: v.to_string(),
            })
        })
        .collect()
}

fn load_state(source: &str) -> Result<BlochDiagonalState, CliError> {
    if source == "rho_be" {
        return Ok(rho_be());
    }
    let text = fs::read_to_string(source).map_err(|e| CliError::Usage(format!("reading {source}: {e}")))?;
    let file: StateFile =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed state file {source}: {e}")))?;
    Ok(BlochDiagonalState::from_json(&file)?)
}

fn state_info(source: &str, visibility: Option<f64>) -> Result<Rendered, CliError> {
    let mut state = load_state(source)?;
    if let Some(v) = visibility {
        state = mix_with_white_noise(&state, v)?;
    }
    let report = ppt_check(&state)?;
    let dense_ccnr = if state.qubits_per_side() <= MAX_DENSE_QUBITS_PER_SIDE {
        let basis = PauliBasis::new(state.qubits_per_side()).map_err(|e| CliError::Failure(e.to_string()))?;
        Some(ccnr_dense(&state.densify()?, &basis)?)
    } else {
        None
    };
    let witness = match state.n_copies() {
        Some(n) => {
            let signs = SignVector::from_coefficients(state.lambdas(), n).map_err(|e| CliError::Usage(e.to_string()))?;
            let task = TaskSpec::new(n, state.local_dim(), signs)?;
            Some(witness_closed_form(&state, &task)?.value)
        }
        None => None,
    };
    let note = if report.ccnr <= 1.0 + 1e-12 {
        "CCNR value at most 1: not detected as entangled by the realignment criterion"
    } else {
        "CCNR value above 1: entangled"
    };
    let json = to_json(&json!({
        "source": source,
        "visibility": visibility,
        "state": state.to_json(),
        "report": report,
        "ccnr_realignment": dense_ccnr,
        "witness_closed_form": witness,
        "note": note,
    }));
    let mut rows = vec![
        vec!["qubits_per_side".to_string(), state.qubits_per_side().to_string()],
        vec!["ccnr".into(), fmt_f64(report.ccnr)],
        vec!["is_ppt".into(), report.is_ppt.to_string()],
        vec!["min_eig_state".into(), fmt_f64(report.min_eig_state)],
        vec!["min_eig_pt".into(), fmt_f64(report.min_eig_pt)],
    ];
    if let Some(d) = dense_ccnr {
        rows.push(vec!["ccnr_realignment".into(), fmt_f64(d)]);
    }
    if let Some(w) = witness {
        rows.push(vec!["witness_closed_form".into(), fmt_f64(w)]);
    }
    for (k, l) in state.lambdas().iter().enumerate() {
        rows.push(vec![format!("lambda_{}", k + 1), fmt_f64(*l)]);
    }
    Ok(Rendered {
        json,
        csv: table(&["field", "value"], &rows),
    })
}

fn witness(
    source: &str,
    copies: usize,
    method: Option<Method>,
    samples: usize,
    visibility: Option<f64>,
    seed: u64,
) -> Result<WitnessResult, CliError> {
    if copies == 0 {
        return Err(CliError::Usage("--copies must be at least 1".into()));
    }
    let method = method.unwrap_or(if copies == 1 { Method::Brute } else { Method::Factored });
    let plan = if copies == 1 {
        SamplingPlan::Full
    } else {
        SamplingPlan::Seeded { count: samples, seed }
    };
    let mut result = match source {
        "be" => {
            let mut copy = rho_be();
            if let Some(v) = visibility {
                copy = mix_with_white_noise(&copy, v)?;
            }
            let task = TaskSpec::rho_be(copies)?;
            match method {
                Method::Closed if copies <= MAX_CLOSED_FORM_COPIES => {
                    witness_closed_form(&tensor_power(&copy, copies)?, &task)?
                }
                Method::Closed => witness_closed_form_power(&copy, &task)?,
                Method::Factored => witness_factored_total(&copy, &task)?,
                Method::Brute => {
                    let state = if copies == 1 { copy } else { tensor_power(&copy, copies)? };
                    witness_brute_force(&be_strategy(&state)?, &task, &plan)?
                }
            }
        }
        other => {
            if visibility.is_some() {
                return Err(CliError::Usage("--visibility applies to the be strategy only".into()));
            }
            if method != Method::Brute {
                return Err(CliError::Usage(format!(
                    "strategy {other:?} supports brute-force evaluation only"
                )));
            }
            let strategy = if other == "classical-optimal" {
                if copies != 1 {
                    return Err(CliError::Usage("classical-optimal is a single-copy strategy".into()));
                }
                classical_optimal_strategy_d4()?
            } else {
                load_strategy(other)?
            };
            if strategy.n_copies() != copies {
                return Err(CliError::Usage(format!(
                    "strategy has {} copies but --copies is {copies}",
                    strategy.n_copies()
                )));
            }
            let per_copy = crate::protocol::per_copy_signs(&rho_be());
            let task = TaskSpec::new(copies, strategy.channel_dim(), SignVector::product(per_copy, copies).map_err(|e| CliError::Usage(e.to_string()))?)?;
            witness_brute_force(&strategy, &task, &plan)?
        }
    };
    result.seed = Some(seed);
    Ok(result)
}

fn load_strategy(path: &str) -> Result<Strategy, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {path}: {e}")))?;
    let file: StrategyFile =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed strategy file {path}: {e}")))?;
    Ok(Strategy::from_file(file)?)
}

fn summary_row(r: &OptimizationReport) -> Vec<String> {
    let kind = serde_json::to_value(r.kind)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    vec![
        kind,
        r.channel_dim.to_string(),
        fmt_f64(r.best_value),
        r.upper_bound.map(fmt_f64).unwrap_or_default(),
        r.best_restart.to_string(),
        r.restarts.len().to_string(),
        r.converged.to_string(),
        r.seed.to_string(),
    ]
}

const SUMMARY_HEADER: [&str; 8] = [
    "kind",
    "D",
    "best_value",
    "upper_bound",
    "best_restart",
    "restarts",
    "converged",
    "seed",
];

fn emit_report(c: &CommonArgs, report: &OptimizationReport, summary: Option<&Path>) -> Result<(), CliError> {
    let row = summary_row(report);
    emit(c, &to_json(report), &table(&SUMMARY_HEADER, std::slice::from_ref(&row)))?;
    if let Some(path) = summary {
        let fresh = !path.exists();
        let file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Failure(format!("opening {}: {e}", path.display())))?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            w.write_record(SUMMARY_HEADER).map_err(|e| CliError::Failure(e.to_string()))?;
        }
        w.write_record(&row).map_err(|e| CliError::Failure(e.to_string()))?;
        w.flush().map_err(|e| CliError::Failure(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(format_significant(0.375, 12), "0.375");
        assert_eq!(format_significant(3.0 / 7.0, 12), "0.428571428571");
        assert_eq!(format_significant(0.140625, 12), "0.140625");
        assert_eq!(format_significant(36.0, 12), "36");
        assert_eq!(format_significant(-0.25, 12), "-0.25");
        assert_eq!(format_significant(1.5e-9, 12), "1.5e-9");
    }

    #[test]
    fn scaling_table_rows() {
        let rows = scaling_rows(2).unwrap();
        assert_eq!(
            (rows[0].w_be.as_str(), rows[0].sep_bound_4n.as_str(), rows[0].overhead_dim, rows[0].v_crit.as_str()),
            ("0.375", "0.25", 6, "0.6")
        );
        assert_eq!(
            (rows[1].w_be.as_str(), rows[1].sep_bound_4n.as_str(), rows[1].overhead_dim, rows[1].v_crit.as_str()),
            ("0.140625", "0.0625", 36, "0.428571428571")
        );
        assert!(scaling_rows(0).is_err());
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(["boundent", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["boundent", "ccnr-search", "--dim", "6"]), EXIT_USAGE);
        assert_eq!(run(["boundent", "witness", "--strategy", "classical-optimal", "--method", "closed"]), EXIT_USAGE);
        assert_eq!(run(["boundent", "--help"]), EXIT_OK);
    }

    #[test]
    fn witness_defaults() {
        let w = witness("be", 1, None, 10, None, 0).unwrap();
        assert!((w.value - 0.375).abs() < 1e-10);
        let w = witness("be", 4, Some(Method::Closed), 10, None, 0).unwrap();
        assert!((w.value - 0.375f64.powi(4)).abs() < 1e-12);
        let w = witness("classical-optimal", 1, None, 10, None, 0).unwrap();
        assert!((w.value - 0.25).abs() < 1e-12);
    }
}
