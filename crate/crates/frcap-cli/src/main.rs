//! `frcap`: reproduce the quantitative behavior of fraction capacities and
//! non-additive integrals on ensemble spaces from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use frcap_cli::checks;
use frcap_cli::report::{CheckResult, ReproReport};

/// Environment variable naming the default directory for output files.
const OUT_DIR_ENV: &str = "FRCAP_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "frcap",
    version,
    about = "Fraction capacities and non-additive integrals on ensemble spaces",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the survival profile phi({F >= s}) as CSV: closed form,
    /// numeric solver and discretization oracle per threshold.
    CapacityProfile {
        /// Minimum of the variable over the pure states (0 < a < b).
        #[arg(long)]
        a: f64,
        /// Maximum of the variable over the pure states.
        #[arg(long)]
        b: f64,
        /// Number of thresholds sampled across [0, b + (b - a) / 2].
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Sphere points for the discretization oracle.
        #[arg(long, default_value_t = 10_000)]
        oracle_samples: usize,
        /// Seed recorded with the oracle sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path; relative paths resolve under FRCAP_OUT_DIR.
        #[arg(long)]
        out: PathBuf,
    },
    /// Choquet integral at the Bloch center versus the expectation.
    BlochChoquet {
        /// Minimum of the variable over the pure states (0 < a < b).
        #[arg(long)]
        a: f64,
        /// Maximum of the variable over the pure states.
        #[arg(long)]
        b: f64,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Random classical instances: Choquet equals the expectation; the fixed
    /// Sugeno counterexample does not.
    ClassicalCheck {
        /// Number of outcomes of the sampled distributions.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Number of random instances.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance on |choquet - expectation|.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the complete verification suite and write a JSON report.
    VerifyAll {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Test hook: zero the named check's tolerance to force a failure.
        #[arg(long, hide = true)]
        corrupt_tolerance: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Marker for argument errors that clap cannot catch statically.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(err: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(UsageError(format!("{err:#}")))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::CapacityProfile {
            a,
            b,
            samples,
            oracle_samples,
            seed,
            out,
        } => {
            let profile =
                checks::capacity_profile(a, b, samples, oracle_samples, seed).map_err(usage)?;
            let path = resolve_out(&out);
            write_output(&path, &profile.csv)?;
            print_checks(&profile.checks);
            println!("wrote {} rows to {}", samples, path.display());
            Ok(profile.checks.iter().all(|c| c.pass))
        }
        Command::BlochChoquet {
            a,
            b,
            tol,
            out,
            seed,
        } => {
            let results = checks::bloch_choquet_checks(a, b, tol).map_err(usage)?;
            let mut report = ReproReport::new(seed, Default::default());
            report.extend(results);
            finish_report(report, out.as_deref(), None)
        }
        Command::ClassicalCheck {
            n,
            trials,
            seed,
            tol,
            out,
        } => {
            let results = checks::classical_checks(n, trials, seed, tol).map_err(usage)?;
            let mut report = ReproReport::new(seed, Default::default());
            report.extend(results);
            finish_report(report, out.as_deref(), None)
        }
        Command::VerifyAll {
            seed,
            out,
            corrupt_tolerance,
        } => {
            let report = checks::verify_all(seed)?;
            finish_report(report, out.as_deref(), corrupt_tolerance.as_deref())
        }
    }
}

fn finish_report(
    mut report: ReproReport,
    out: Option<&Path>,
    corrupt: Option<&str>,
) -> Result<bool> {
    if let Some(name) = corrupt {
        if !report.corrupt_tolerance(name) {
            return Err(usage(anyhow::anyhow!("no check named {name:?} to corrupt")));
        }
    }
    print_checks(&report.checks);
    if let Some(path) = out {
        let path = resolve_out(path);
        write_output(&path, &report.to_json())?;
        println!("report written to {}", path.display());
    }
    if report.pass() {
        println!("verdict: PASS ({} checks)", report.checks.len());
        Ok(true)
    } else {
        let names: Vec<&str> = report.failing().iter().map(|c| c.name.as_str()).collect();
        println!(
            "verdict: FAIL ({} of {} checks): {}",
            names.len(),
            report.checks.len(),
            names.join(", ")
        );
        Ok(false)
    }
}

fn print_checks(checks: &[CheckResult]) {
    for check in checks {
        println!(
            "{} {:<45} computed={:<24} reference={:<24} tol={:.1e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            format!("{}", check.computed),
            format!("{}", check.reference),
            check.tolerance,
        );
    }
}

/// Relative output paths land in `FRCAP_OUT_DIR` when it is set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(path);
            }
        }
    }
    path.to_path_buf()
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
