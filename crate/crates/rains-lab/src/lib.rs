//! Command-line front end for the Rains relative entropy toolkit:
//! state/instrument I/O, one subcommand per computation or verification
//! suite, deterministic JSON reports.
//!
//! Every report is a JSON envelope `{"manifest": …, "report": …}`. The
//! manifest records the normalized command line, input file paths, the
//! solver configuration, the seed, the tool version, the wall time, and a
//! SHA-256 digest of the canonical report bytes. Wall time lives only in
//! the manifest and is excluded from the digest, so an identical command
//! line with identical input files reproduces the report byte for byte.
//!
//! Exit codes: `0` — command met its goal; `1` — inputs unusable (parse
//! failures, invariant or range violations, unknown names); `2` — command
//! completed but failed its goal (solver non-convergence, failed suite
//! records).

#![forbid(unsafe_code)]

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use rains_core::bipartite::DensityMatrix;
use rains_core::io::{self, RainsResultJson};
use rains_core::pade::{full_report, PadeQuery};
use rains_core::rains::{rains_divergence, SolverConfig};
use rains_core::suites::{assemble_report, check_dims, fixed_records, trial_records, SuiteKind};
use rains_core::{Divergence, Error, RenyiOrder, RenyiVariant, Result};

/// Exit codes used by every subcommand.
pub mod exit {
    /// Command completed and met its goal.
    pub const PASS: u8 = 0;
    /// Inputs could not be used.
    pub const INPUT_ERROR: u8 = 1;
    /// Command completed but did not meet its goal.
    pub const FAILURE: u8 = 2;
}

#[derive(Parser)]
#[command(
    name = "rains-lab",
    version,
    about = "Rains relative entropies, PPT monotonicity suites, and \
             distillable-entanglement upper bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize a divergence over the PPT′ set for a state file.
    Rains(RainsArgs),
    /// Run a named verification suite over a seeded trial stream.
    Verify(VerifyArgs),
    /// Compute distillable-entanglement upper bounds for a state file.
    Pade(PadeArgs),
}

#[derive(Args)]
struct RainsArgs {
    /// Path to the state file (JSON with d_a, d_b, and a row-major matrix).
    state_file: PathBuf,
    /// Rényi order α; omit to minimize the relative entropy.
    #[arg(long)]
    alpha: Option<f64>,
    /// Rényi variant: sandwiched, petz, or geometric (requires --alpha).
    #[arg(long)]
    variant: Option<String>,
    /// Solver tolerance in bits.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Seed for the solver's randomized start.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: monotone, flags, direct-sum, pade-lemmas, or
    /// solver-oracle.
    suite: String,
    /// Number of sampled trials.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Local dimensions for sampled trials, e.g. 2x2 or 2x3.
    #[arg(long, default_value = "2x2")]
    dims: String,
    /// Base seed of the trial stream (also seeds the solver).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance in bits.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PadeArgs {
    /// Path to the state file (JSON with d_a, d_b, and a row-major matrix).
    state_file: PathBuf,
    /// Error parameter ε in [0, 1/2] (the full report includes bounds that
    /// are only stated for ε up to 1/2).
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Comma-separated Rényi orders, each > 1 (default grid when omitted).
    #[arg(long)]
    alpha_grid: Option<String>,
    /// Largest tensor power for the regularized entries (1 to 3).
    #[arg(long, default_value_t = 1)]
    ell_max: usize,
    /// Solver tolerance in bits.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Seed for the solver's randomized start.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Provenance metadata embedded in every report.
#[derive(Serialize)]
struct RunManifest {
    /// Normalized command line (`rains-lab` followed by the arguments).
    command: Vec<String>,
    /// Input file paths as given.
    inputs: Vec<String>,
    /// Solver configuration in force.
    config: SolverConfig,
    /// Seed in force.
    seed: u64,
    /// Tool version.
    version: &'static str,
    /// Elapsed wall time in milliseconds; excluded from the digest.
    wall_time_ms: f64,
    /// SHA-256 of the canonical report bytes.
    output_digest: String,
}

/// Report envelope: the manifest precedes the report so the report bytes
/// form a contiguous suffix of the file.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    manifest: &'a RunManifest,
    report: &'a T,
}

/// Entry point. Parses `argv`, runs the subcommand, and returns the
/// process exit code.
pub fn run(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    exit::PASS
                }
                _ => {
                    eprint!("{e}");
                    exit::INPUT_ERROR
                }
            };
        }
    };
    let ctx = RunCtx {
        argv: &argv,
        started: Instant::now(),
    };
    let outcome = init_thread_pool().and_then(|()| match &cli.command {
        Command::Rains(a) => cmd_rains(&ctx, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
        Command::Pade(a) => cmd_pade(&ctx, a),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::INPUT_ERROR
        }
    }
}

struct RunCtx<'a> {
    argv: &'a [String],
    started: Instant,
}

/// Sizes the global thread pool from `RAINS_LAB_THREADS` (defaults to the
/// machine's core count when unset).
fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("RAINS_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| Error::OutOfRange {
        context: format!("RAINS_LAB_THREADS must be a positive integer, got {raw:?}"),
    })?;
    if threads == 0 {
        return Err(Error::OutOfRange {
            context: "RAINS_LAB_THREADS must be at least 1".into(),
        });
    }
    // A second initialization (only possible when `run` is called twice in
    // one process) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn load_state(path: &PathBuf) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path)?;
    io::state_from_json(&text)
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].parse::<usize>(), parts[1].parse::<usize>()) {
            if a >= 1 && b >= 1 {
                return Ok((a, b));
            }
        }
    }
    Err(Error::OutOfRange {
        context: format!("--dims must look like 2x2, got {s:?}"),
    })
}

fn parse_alpha_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| Error::OutOfRange {
                context: format!("--alpha-grid entries must be numbers, got {tok:?}"),
            })
        })
        .collect()
}

fn divergence_from_flags(alpha: Option<f64>, variant: Option<&str>) -> Result<Divergence> {
    match (alpha, variant) {
        (None, None) => Ok(Divergence::Relative),
        (None, Some(_)) => Err(Error::OutOfRange {
            context: "--variant requires --alpha".into(),
        }),
        (Some(a), v) => {
            let variant = RenyiVariant::parse(v.unwrap_or("sandwiched"))?;
            Ok(Divergence::Renyi(RenyiOrder::new(a, variant)?))
        }
    }
}

/// Serializes the report, wraps it with its manifest, and writes the
/// envelope to `--out` or stdout. Returns the goal-dependent exit code.
fn emit<T: Serialize>(
    ctx: &RunCtx,
    report: &T,
    passed: bool,
    inputs: &[&PathBuf],
    config: &SolverConfig,
    seed: u64,
    out: Option<&PathBuf>,
) -> Result<u8> {
    let body = io::to_json_string(report)?;
    let digest = Sha256::digest(body.as_bytes());
    let mut command: Vec<String> = ctx.argv.to_vec();
    if let Some(first) = command.first_mut() {
        "rains-lab".clone_into(first);
    }
    let manifest = RunManifest {
        command,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        config: config.clone(),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: ctx.started.elapsed().as_secs_f64() * 1e3,
        output_digest: digest.iter().map(|b| format!("{b:02x}")).collect(),
    };
    let text = io::to_json_string(&Envelope {
        manifest: &manifest,
        report,
    })? + "\n";
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(if passed { exit::PASS } else { exit::FAILURE })
}

fn cmd_rains(ctx: &RunCtx, a: &RainsArgs) -> Result<u8> {
    let rho = load_state(&a.state_file)?;
    let cfg = SolverConfig {
        tol: a.tol,
        seed: a.seed,
        ..SolverConfig::default()
    };
    let div = divergence_from_flags(a.alpha, a.variant.as_deref())?;
    let result = rains_divergence(&rho, div, &cfg)?;
    emit(
        ctx,
        &RainsResultJson::encode(&result),
        result.converged,
        &[&a.state_file],
        &cfg,
        a.seed,
        a.out.as_ref(),
    )
}

fn cmd_verify(ctx: &RunCtx, a: &VerifyArgs) -> Result<u8> {
    let kind = SuiteKind::parse(&a.suite)?;
    let dims = parse_dims(&a.dims)?;
    check_dims(dims)?;
    let cfg = SolverConfig {
        tol: a.tol,
        seed: a.seed,
        ..SolverConfig::default()
    };
    let fixed = fixed_records(kind, dims, &cfg)?;
    // Trial inputs depend only on the trial index, so the stream evaluates
    // in parallel and reassembles in index order.
    let blocks = (0..a.trials)
        .into_par_iter()
        .map(|t| trial_records(kind, t, a.trials, dims, a.seed, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let report = assemble_report(kind, a.trials, dims, a.seed, &cfg, fixed, blocks);
    let passed = report.passed;
    emit(ctx, &report, passed, &[], &cfg, a.seed, a.out.as_ref())
}

fn cmd_pade(ctx: &RunCtx, a: &PadeArgs) -> Result<u8> {
    let rho = load_state(&a.state_file)?;
    let cfg = SolverConfig {
        tol: a.tol,
        seed: a.seed,
        ..SolverConfig::default()
    };
    let query = match &a.alpha_grid {
        Some(grid) => PadeQuery::new(rho, a.epsilon, parse_alpha_grid(grid)?)?,
        None => PadeQuery::with_default_grid(rho, a.epsilon)?,
    };
    let report = full_report(&query, a.ell_max, &cfg)?;
    let passed = report.converged;
    emit(
        ctx,
        &report,
        passed,
        &[&a.state_file],
        &cfg,
        a.seed,
        a.out.as_ref(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parse_accepts_rectangles_and_rejects_garbage() {
        assert_eq!(parse_dims("2x2").unwrap(), (2, 2));
        assert_eq!(parse_dims("2x3").unwrap(), (2, 3));
        assert!(parse_dims("2×3").is_err());
        assert!(parse_dims("0x2").is_err());
        assert!(parse_dims("4").is_err());
        assert!(parse_dims("2x2x2").is_err());
    }

    #[test]
    fn alpha_grid_parse() {
        assert_eq!(parse_alpha_grid("1.5,2, 4").unwrap(), vec![1.5, 2.0, 4.0]);
        assert!(parse_alpha_grid("1.5,two").is_err());
    }

    #[test]
    fn divergence_flags() {
        assert!(matches!(
            divergence_from_flags(None, None).unwrap(),
            Divergence::Relative
        ));
        assert!(divergence_from_flags(None, Some("petz")).is_err());
        let d = divergence_from_flags(Some(2.0), None).unwrap();
        assert_eq!(d.label(), "sandwiched-2");
        let d = divergence_from_flags(Some(1.5), Some("geometric")).unwrap();
        assert_eq!(d.label(), "geometric-1.5");
        assert!(divergence_from_flags(Some(2.0), Some("renyi")).is_err());
    }

    #[test]
    fn help_and_bad_flags_exit_codes() {
        let code = run(vec!["rains-lab".into(), "--help".into()]);
        assert_eq!(code, exit::PASS);
        let code = run(vec!["rains-lab".into(), "frobnicate".into()]);
        assert_eq!(code, exit::INPUT_ERROR);
        let code = run(vec![
            "rains-lab".into(),
            "verify".into(),
            "no-such-suite".into(),
        ]);
        assert_eq!(code, exit::INPUT_ERROR);
    }
}
