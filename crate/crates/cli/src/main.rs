//! Experiment runner for the Dunkl q-Szasz-Mirakjan-Kantorovich-Stancu
//! operator library: moment audits, convergence tables, bivariate audits,
//! and rate-bound audits, emitted as deterministic CSV or JSON.
//!
//! Exit codes: 0 on success, 1 when an equality audit fails (bound audits
//! are report-only and never gate), 2 on configuration or runtime errors.

mod config;
mod output;
mod runner;

use clap::{Args, Parser, Subcommand};
use config::Config;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dunkl-szasz", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit numeric moments against their closed forms and bounds
    Moments(RunArgs),
    /// Convergence table under a q_n schedule
    Converge(RunArgs),
    /// Bivariate moment, factorization, and rate-bound audit
    Bivariate(RunArgs),
    /// Rate-bound audit across registry functions (report-only)
    BoundsAudit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Operator indices, comma separated
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    /// Fixed q in (0,1); mutually exclusive with --q-schedule
    #[arg(long, conflicts_with = "q_schedule")]
    q: Option<f64>,
    /// Schedule: one_minus_inv_n or one_minus_inv_sqrt_n
    #[arg(long)]
    q_schedule: Option<String>,
    /// Dunkl parameter mu > -1/2
    #[arg(long)]
    mu: Option<f64>,
    /// Stancu shift alpha (0 <= alpha <= beta)
    #[arg(long)]
    alpha: Option<f64>,
    /// Stancu scale beta
    #[arg(long)]
    beta: Option<f64>,
    /// Right endpoint of the evaluation grid
    #[arg(long)]
    x_max: Option<f64>,
    /// Number of grid points (>= 2)
    #[arg(long)]
    grid_points: Option<usize>,
    /// Registry function names, comma separated
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<String>>,
    /// Relative tail criterion for series truncation
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Hard cap on series terms
    #[arg(long)]
    max_terms: Option<usize>,
    /// Tolerance for pass/fail audit columns
    #[arg(long)]
    audit_tol: Option<f64>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the normalized key=value config and exit without running
    #[arg(long)]
    dump_config: bool,
}

fn build_config(args: &RunArgs) -> Result<Config, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Config::parse(&text).map_err(|e| e.to_string())?
        }
        None => Config::default(),
    };
    let mut set = |key: &str, value: Option<String>| -> Result<(), String> {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| e.to_string())?;
        }
        Ok(())
    };
    set("n_list", args.n_list.as_ref().map(|v| {
        v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }))?;
    set("q", args.q.map(|v| v.to_string()))?;
    set("q_schedule", args.q_schedule.clone())?;
    set("mu", args.mu.map(|v| v.to_string()))?;
    set("alpha", args.alpha.map(|v| v.to_string()))?;
    set("beta", args.beta.map(|v| v.to_string()))?;
    set("x_max", args.x_max.map(|v| v.to_string()))?;
    set("grid_points", args.grid_points.map(|v| v.to_string()))?;
    set("functions", args.functions.as_ref().map(|v| v.join(",")))?;
    set("tail_tol", args.tail_tol.map(|v| format!("{v:e}")))?;
    set("max_terms", args.max_terms.map(|v| v.to_string()))?;
    set("audit_tol", args.audit_tol.map(|v| format!("{v:e}")))?;
    set("format", args.format.clone())?;
    set(
        "out",
        args.out.as_ref().map(|p| p.display().to_string()),
    )?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    let (args, runner): (&RunArgs, fn(&Config) -> Result<runner::RunOutcome, runner::RunError>) =
        match &cli.command {
            Command::Moments(a) => (a, runner::run_moments),
            Command::Converge(a) => (a, runner::run_converge),
            Command::Bivariate(a) => (a, runner::run_bivariate),
            Command::BoundsAudit(a) => (a, runner::run_bounds_audit),
        };
    let cfg = build_config(args)?;
    if args.dump_config {
        print!("{}", cfg.serialize());
        return Ok(false);
    }
    let outcome = runner(&cfg).map_err(|e| e.to_string())?;
    let rendered = outcome.table.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {path}: {e}"))?,
        None => print!("{rendered}"),
    }
    Ok(outcome.equality_failed)
}

fn main() -> ExitCode {
    match run() {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("equality audit failed");
            ExitCode::from(1)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
