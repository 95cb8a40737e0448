use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use boostfw_cli::config::{ExperimentConfig, Overrides, RuleName};
use boostfw_cli::experiment::{run_experiment, ComparisonReport, Execution};
use boostfw_cli::{csvio, is_validation, thetas, verify, ValidationError};
use clap::{Args, Parser, Subcommand};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_SUITE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "boostfw",
    version,
    about = "Run and compare Frank-Wolfe solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solvers of a config one after another.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run the solvers of a config concurrently, one thread each.
    Compare {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run invariant suites by name, or `all`.
    Verify {
        #[arg(required = true)]
        suites: Vec<String>,
    },
    /// Print θ tables recomputed from the rounds files of a run directory.
    Thetas {
        trace_dir: PathBuf,
        /// Write the table here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    budget_iters: Option<usize>,
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Pursuit alignment threshold for boosted solvers.
    #[arg(long)]
    delta: Option<f64>,
    /// Cap on pursuit rounds for boosted solvers.
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long, value_parser = ["agnostic", "short", "ls"])]
    step_rule: Option<String>,
}

impl RunFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            budget_iters: self.budget_iters,
            budget_seconds: self.budget_seconds,
            delta: self.delta,
            max_rounds: self.max_rounds,
            step_rule: self.step_rule.as_deref().and_then(RuleName::parse),
        }
    }
}

fn experiment(config: &Path, flags: &RunFlags, execution: Execution) -> Result<u8> {
    let mut cfg = ExperimentConfig::load(config)?;
    cfg.apply(&flags.overrides());
    cfg.check()?;
    let report = run_experiment(&cfg, execution)?;
    print_report(&report);
    Ok(if report.failures().next().is_some() {
        EXIT_RUNTIME
    } else {
        0
    })
}

fn print_report(report: &ComparisonReport) {
    println!(
        "{} (seed {}): {}",
        report.name, report.seed, report.description
    );
    for r in &report.results {
        match &r.outcome {
            Ok(t) => {
                let last = t.last();
                println!(
                    "  {:<24} {:<10} t = {:<6} calls = {:<7} f = {:.10e} gap = {:.3e}",
                    r.label,
                    t.status.as_str(),
                    last.iter,
                    last.oracle_calls,
                    last.f_value,
                    last.duality_gap
                );
            }
            Err(e) => println!("  {:<24} FAILED: {e}", r.label),
        }
    }
    println!("wrote {}", report.out_dir.display());
}

fn run_verify(suites: &[String]) -> Result<u8> {
    let mut failed = 0;
    for name in verify::resolve(suites)? {
        let outcome = verify::run_suite(name);
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", outcome.name, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    Ok(if failed > 0 { EXIT_SUITE } else { 0 })
}

fn run_thetas(dir: &Path, out: Option<&PathBuf>) -> Result<u8> {
    let tables = thetas::thetas_from_dir(dir)?;
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| ValidationError(format!("cannot create {}: {e}", path.display())))?;
            csvio::write_thetas(&tables, &mut file)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            csvio::write_thetas(&tables, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { config, flags } => experiment(config, flags, Execution::Sequential),
        Command::Compare { config, flags } => experiment(config, flags, Execution::Parallel),
        Command::Verify { suites } => run_verify(suites),
        Command::Thetas { trace_dir, out } => run_thetas(trace_dir, out.as_ref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_validation(&e) {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            })
        }
    }
}
