//! Command-line front end.

mod run;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use run::{execute_run, execute_sweep, RunSummary};

use crate::analysis::{write_csv, SweepOptions};
use crate::config::RunConfig;
use crate::error::Error;

#[derive(Parser, Debug)]
#[command(name = "cavity-ghz", version, about = "Simulate GHZ-state generation in coupled cavities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the configured protocol once.
    Run {
        /// JSON configuration file, or `preset:<name>`.
        config: String,
        /// Overrides the configuration's `noise` setting.
        #[arg(long, value_enum)]
        noise: Option<Switch>,
        /// Single-row CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time in the CSV.
        #[arg(long)]
        timing: bool,
    },
    /// Run the configuration's sweep section.
    Sweep {
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum)]
        noise: Option<Switch>,
        #[arg(long)]
        timing: bool,
    },
    /// Run the built-in checks.
    Verify {
        /// Deliberately break one ingredient (for testing the checks).
        #[arg(long, value_enum, hide = true)]
        inject: Option<verify::Mutation>,
    },
}

/// 1 for configuration problems, 2 for dimension caps, 3 for integrator
/// invariant failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DimensionCap { .. } => 2,
        e if e.is_integrator_failure() => 3,
        _ => 1,
    }
}

fn report_error(err: &Error) -> i32 {
    eprintln!("error: {err}");
    if let Error::DimensionCap { kind: "density-matrix", .. } = err {
        eprintln!("hint: density runs are limited to reduced layouts; try preset:reduced-n2m2");
    }
    exit_code(err)
}

fn noise_flag(flag: Option<Switch>, cfg: &RunConfig) -> bool {
    flag.map_or(cfg.noise, |s| s == Switch::On)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, noise, out, timing } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return report_error(&e),
            };
            let noise = noise_flag(noise, &cfg);
            let start = Instant::now();
            let summary = match execute_run(&cfg, noise) {
                Ok(s) => s,
                Err(e) => return report_error(&e),
            };
            let wall = start.elapsed().as_secs_f64() * 1e3;
            print_summary(&summary);
            if let Some(path) = out {
                let mut rec = summary.record("none", f64::NAN);
                if timing {
                    rec.wall_ms = wall;
                }
                if let Err(e) = write_csv(&[rec], &path) {
                    return report_error(&e);
                }
            }
            0
        }
        Command::Sweep { config, out, jobs, noise, timing } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return report_error(&e),
            };
            let noise = noise_flag(noise, &cfg);
            let outcome = match execute_sweep(&cfg, noise, SweepOptions { jobs: jobs.max(1), timing }) {
                Ok(o) => o,
                Err(e) => return report_error(&e),
            };
            for (i, err) in &outcome.failures {
                eprintln!("point {} failed: {err}", i + 1);
            }
            if let Err(e) = write_csv(&outcome.records, &out) {
                return report_error(&e);
            }
            match outcome.fidelity_range() {
                Some((lo, hi)) => {
                    println!(
                        "{} points, {} failed; fidelity min {lo:.9} max {hi:.9}; wrote {}",
                        outcome.records.len(),
                        outcome.failures.len(),
                        out.display()
                    );
                    0
                }
                None => {
                    println!("all {} points failed; wrote {}", outcome.records.len(), out.display());
                    outcome.failures.first().map_or(1, |(_, e)| exit_code(e))
                }
            }
        }
        Command::Verify { inject } => {
            let results = verify::run_checks(inject);
            println!("{}", verify::format_table(&results));
            if results.iter().all(|r| r.passed) { 0 } else { 3 }
        }
    }
}

fn print_summary(s: &RunSummary) {
    println!("mode            {:?}", s.mode);
    println!("noise           {}", if s.noise { "on" } else { "off" });
    println!("representation  {} (dim {})", if s.density { "density matrix" } else { "state vector" }, s.dim);
    if s.staggered {
        println!("timing          staggered");
    }
    println!("fidelity        {:.12}", s.fidelity);
    println!("t_op            {:.6} us", s.t_op_us);
    println!("trace error     {:.3e}", s.trace_err);
    println!("hermiticity     {:.3e}", s.hermiticity_err);
    if s.density {
        println!("min eigenvalue  {:.3e}", s.min_eig);
    }
    if let Some(r) = s.phase_ratio {
        println!("phase ratio     {:.12} {:+.12}i", r.re, r.im);
    }
    if let Some(p) = s.coupler_purity {
        println!("coupler purity  {p:.12}");
    }
    println!("steps           {}", s.steps);
    println!("config hash     {}", s.config_hash);
}
