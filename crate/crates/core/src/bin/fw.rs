//! Experiment runner CLI.
//!
//! Exit codes: 0 success, 1 bound violation (strict mode), 2 usage or
//! parse error, 3 numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use frankwolfe::experiment::{render_report, run_experiment, run_suite};
use frankwolfe::ratefit::{fit_rate, RateFitOutcome};
use frankwolfe::trace_io::parse_trace_csv;
use frankwolfe::{parse_config, Error};

#[derive(Parser)]
#[command(name = "fw", about = "Frank-Wolfe experiment runner and bound checker")]
struct Cli {
    /// Treat bound violations as failures (default).
    #[arg(long, global = true, action = ArgAction::SetTrue, conflicts_with = "lenient")]
    strict: bool,
    /// Report bound violations without failing the process.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    lenient: bool,
    /// Override the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output artifacts; relative output paths resolve here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: solve, check every bound, write trace and report.
    Run { config: PathBuf },
    /// Run every .cfg in a directory and aggregate pass/fail per check.
    Suite { dir: PathBuf },
    /// Run the bound checks only; no trace or report files are written.
    Check { config: PathBuf },
    /// Fit an empirical decay rate to the min_gap column of a trace CSV.
    Rate {
        trace: PathBuf,
        /// Iteration window `a:b` (inclusive).
        #[arg(long)]
        window: Option<String>,
    },
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> Result<frankwolfe::ExperimentConfig, Error> {
    let mut cfg = parse_config(&read_file(path)?)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let strict = !cli.lenient;
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_config(config, cli.seed)?;
            let out = run_experiment(&cfg, cli.out.as_deref())?;
            print!(
                "{}",
                render_report(&out.trace, &out.report, out.curvature_c, out.c_certified)
            );
            if let Some(p) = &out.trace_path {
                println!("trace written to {}", p.display());
            }
            if let Some(p) = &out.report_path {
                println!("report written to {}", p.display());
            }
            Ok(if strict && out.report.failures() > 0 { 1 } else { 0 })
        }
        Command::Check { config } => {
            let mut cfg = load_config(config, cli.seed)?;
            cfg.trace_path = None;
            cfg.report_path = None;
            let out = run_experiment(&cfg, None)?;
            print!(
                "{}",
                render_report(&out.trace, &out.report, out.curvature_c, out.c_certified)
            );
            Ok(if strict && out.report.failures() > 0 { 1 } else { 0 })
        }
        Command::Suite { dir } => {
            let summary = run_suite(dir, cli.out.as_deref())?;
            let mut failures = 0_usize;
            println!("{:<32} {:>8} {:>8}", "config", "checks", "failed");
            for entry in &summary.entries {
                match &entry.outcome {
                    Ok(o) => {
                        let failed = o.report.failures();
                        failures += failed;
                        println!(
                            "{:<32} {:>8} {:>8}",
                            entry.name,
                            o.report.checks.len(),
                            failed
                        );
                        for c in &o.report.checks {
                            if c.status == frankwolfe::CheckStatus::Fail {
                                println!("    FAIL {}: max_violation={:.3e}", c.name, c.max_violation);
                            }
                        }
                    }
                    Err(e) => {
                        failures += 1;
                        println!("{:<32} {:>8} {:>8}  error: {e}", entry.name, 0, 1);
                    }
                }
            }
            println!("total failed checks: {failures}");
            Ok(if strict {
                failures.min(255) as u8
            } else {
                0
            })
        }
        Command::Rate { trace, window } => {
            let rows = parse_trace_csv(&read_file(trace)?)?;
            let window = match window {
                Some(spec) => {
                    let (a, b) = spec.split_once(':').ok_or_else(|| {
                        Error::InvalidArgument(format!("bad window {spec:?}, want a:b"))
                    })?;
                    let parse = |s: &str| {
                        s.parse::<usize>().map_err(|_| {
                            Error::InvalidArgument(format!("bad window bound {s:?}"))
                        })
                    };
                    (parse(a)?, parse(b)?)
                }
                None => (
                    rows.first().map(|r| r.t).unwrap_or(0),
                    rows.last().map(|r| r.t).unwrap_or(0),
                ),
            };
            let series: Vec<(usize, f64)> = rows.iter().map(|r| (r.t, r.min_gap)).collect();
            match fit_rate(&series, window)? {
                RateFitOutcome::Fit(fit) => {
                    println!(
                        "slope = {:.6} intercept = {:.6} r_squared = {:.9} window = [{}, {}]",
                        fit.slope, fit.intercept, fit.r_squared, fit.window.0, fit.window.1
                    );
                    Ok(0)
                }
                RateFitOutcome::NoFit { reason } => {
                    println!("no fit: {reason}");
                    Ok(0)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
