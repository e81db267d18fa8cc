//! Command-line front end: exact isometry constants, condition checks,
//! desk-scale recovery solves, and the seeded theorem-validation experiment.
//!
//! Exit codes: 0 success, 1 bad input or internal failure, 2 enumeration cap
//! exceeded, 3 experiment found a condition that held while its guaranteed
//! recovery failed.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use cslab::conditions::{ConditionName, ALL_CONDITIONS};
use cslab::harness::{
    self, evaluate_conditions, run_experiment, ExperimentConfig, HarnessError,
};
use cslab::ric::{
    delta_exact, delta_sampled, theta_exact, theta_sampled, RicError, RicReport,
    DEFAULT_ENUM_CAP,
};
use cslab::solvers::{solve_weighted_l0, solve_weighted_l1, RecoveryResult};
use cslab::textio::{format_real, read_matrix, read_vector};
use cslab::{decompose_support, WeightedNormParams};

#[derive(Parser)]
#[command(
    name = "cslab",
    about = "Verification laboratory for sparse recovery with prior support information",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one restricted isometry or orthogonality constant.
    Ric(RicArgs),
    /// Evaluate recovery conditions for a support/prior pair.
    Check(CheckArgs),
    /// Solve the weighted l0 or l1 recovery problem exactly.
    Solve(SolveArgs),
    /// Run a seeded multi-trial validation experiment, writing a CSV log.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct RicArgs {
    /// Matrix file (`m n` header, one row per line).
    #[arg(long)]
    matrix: PathBuf,
    /// Isometry order k for delta_k.
    #[arg(long, value_name = "K", conflicts_with = "theta")]
    delta: Option<usize>,
    /// Orthogonality order pair `s,stilde` for theta.
    #[arg(long, value_name = "S,STILDE")]
    theta: Option<String>,
    /// Draw this many random subsets instead of exact enumeration.
    #[arg(long, value_name = "N")]
    sample: Option<u64>,
    /// Seed for sampled mode.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact-enumeration cap (number of subsets or pairs).
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    cap: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// True support N as a comma-separated index list (may be empty).
    #[arg(long = "N", value_name = "LIST", default_value = "", hide_default_value = true)]
    true_support: String,
    /// Prior support T as a comma-separated index list (may be empty).
    #[arg(long = "T", value_name = "LIST", default_value = "", hide_default_value = true)]
    prior_support: String,
    /// Prior weight in [0, 1].
    #[arg(long)]
    w: f64,
    /// Condition name, or `all`.
    #[arg(long, default_value = "all")]
    which: String,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    cap: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Measurement vector file (`1 n` header).
    #[arg(long)]
    y: PathBuf,
    /// Prior support T as a comma-separated index list (may be empty).
    #[arg(long = "T", value_name = "LIST", default_value = "", hide_default_value = true)]
    prior_support: String,
    #[arg(long)]
    w: f64,
    /// Norm order: 0 or 1.
    #[arg(long)]
    p: u8,
    /// List every tied minimizer instead of the first.
    #[arg(long)]
    all_minimizers: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

const EXIT_CAP: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn parse_index_list(text: &str) -> Result<Vec<usize>, String> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|piece| {
            piece.trim().parse::<usize>().map_err(|_| format!("bad index {piece:?} in list"))
        })
        .collect()
}

fn print_ric_report(report: &RicReport) {
    println!(
        "{} {} {} {}",
        report.order,
        format_real(report.value),
        report.mode,
        report.subsets_enumerated
    );
}

fn cmd_ric(args: &RicArgs) -> Result<(), CliError> {
    let a = read_matrix(&args.matrix).map_err(HarnessError::from)?;
    let report = match (args.delta, args.theta.as_deref()) {
        (Some(k), None) => match args.sample {
            Some(trials) => delta_sampled(&a, k, trials, args.seed),
            None => delta_exact(&a, k, args.cap),
        },
        (None, Some(pair)) => {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(CliError::Usage("--theta needs `s,stilde`".to_string()));
            }
            let s = parts[0].parse().map_err(|_| CliError::Usage("bad s".to_string()))?;
            let st = parts[1].parse().map_err(|_| CliError::Usage("bad stilde".to_string()))?;
            match args.sample {
                Some(trials) => theta_sampled(&a, s, st, trials, args.seed),
                None => theta_exact(&a, s, st, args.cap),
            }
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --delta or --theta is required".to_string(),
            ))
        }
    }
    .map_err(HarnessError::from)?;
    print_ric_report(&report);
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let a = read_matrix(&args.matrix).map_err(HarnessError::from)?;
    let true_support = parse_index_list(&args.true_support).map_err(CliError::Usage)?;
    let prior = parse_index_list(&args.prior_support).map_err(CliError::Usage)?;
    let decomp = decompose_support(&true_support, &prior, a.cols()).map_err(HarnessError::from)?;
    let selected: Option<ConditionName> = if args.which == "all" {
        None
    } else {
        Some(ConditionName::from_str(&args.which).map_err(CliError::Usage)?)
    };
    let verdicts = evaluate_conditions(&a, &decomp, args.w, args.cap)?;
    for v in &verdicts {
        if selected.is_some_and(|name| name != v.name) {
            continue;
        }
        let order = v.order_used.map(|o| o.to_string()).unwrap_or_default();
        println!(
            "{},{},{},{},{},{}",
            v.name,
            format_real(v.lhs),
            format_real(v.threshold),
            v.holds,
            v.degenerate,
            order
        );
    }
    Ok(())
}

fn result_to_json(result: &RecoveryResult, all_minimizers: bool) -> serde_json::Value {
    let shown = if all_minimizers { result.minimizers.len() } else { 1 };
    let minimizers: Vec<Vec<f64>> =
        result.minimizers.iter().take(shown).map(|m| m.values().to_vec()).collect();
    let certificate = match &result.certificate {
        Some(cert) => serde_json::json!({
            "max_off_support": cert.max_off_support,
            "strict": cert.strict,
        }),
        None => serde_json::Value::Null,
    };
    serde_json::json!({
        "objective": result.objective,
        "minimizers": minimizers,
        "unique": result.unique.to_string(),
        "residual": result.residual,
        "certificate": certificate,
    })
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let a = read_matrix(&args.matrix).map_err(HarnessError::from)?;
    let y = read_vector(&args.y).map_err(HarnessError::from)?;
    let prior = parse_index_list(&args.prior_support).map_err(CliError::Usage)?;
    let params =
        WeightedNormParams::new(a.cols(), &prior, args.w).map_err(HarnessError::from)?;
    let result = match args.p {
        0 => solve_weighted_l0(&a, &y, &params),
        1 => solve_weighted_l1(&a, &y, &params),
        other => return Err(CliError::Usage(format!("--p must be 0 or 1, got {other}"))),
    }
    .map_err(HarnessError::from)?;
    println!("{}", result_to_json(&result, args.all_minimizers));
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_file(&args.config)?;
    let (records, summary) = run_experiment(&cfg)?;
    harness::write_csv(&args.out, &records).map_err(HarnessError::from)?;
    println!("{summary}");
    if summary.violations > 0 {
        return Err(CliError::Violations(summary.violations));
    }
    Ok(())
}

enum CliError {
    Usage(String),
    Violations(usize),
    Harness(HarnessError),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Harness(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Ric(args) => cmd_ric(args),
        Command::Check(args) => cmd_check(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("conditions: {}", ALL_CONDITIONS.map(|c| c.to_string()).join(", "));
            ExitCode::from(1)
        }
        Err(CliError::Violations(count)) => {
            eprintln!("error: {count} theorem violation(s) recorded");
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(CliError::Harness(HarnessError::Ric(err @ RicError::CapExceeded { .. }))) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CAP)
        }
        Err(CliError::Harness(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
