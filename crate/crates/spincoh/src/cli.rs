//! Argument parsing and subcommand dispatch.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spincoh_core::OperatorTriple;

use crate::config::{Scenario, StarsConfig, MAX_TWICE_S, REPORT_JSON, STARS_CSV, SWEEP_CSV, TRAJECTORY_CSV};
use crate::error::CliError;
use crate::output::{artifact, ensure_dir, num, write_csv, write_json, write_trajectory};
use crate::{evolve, stars, sweep, verify};

#[derive(Debug, Parser)]
#[command(name = "spincoh", version, about = "Spin coherent-state precession: classical vs quantum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one scenario and compare the classical and quantum directions.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the config tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Recorded only; evolution is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MAX_TWICE_S)]
        max_twice_s: u32,
    },
    /// Check every identity over random inputs for twice_s = 1..=N.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_twice_s: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write report.json here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<Fault>,
    },
    /// Write the Majorana stars of a state.
    Stars {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = MAX_TWICE_S)]
        max_twice_s: u32,
    },
    /// Evolve every point of the config's sweep axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MAX_TWICE_S)]
        max_twice_s: u32,
        /// Add a wall-clock runtime_s column (makes the file non-reproducible).
        #[arg(long)]
        timing: bool,
    },
}

/// Deliberate corruptions used to check that `verify` catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    FlipSy,
}

fn override_tolerance(sc: &mut Scenario, tolerance: Option<f64>) -> Result<(), CliError> {
    if let Some(t) = tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::config(format!("--tolerance: {t} must be positive and finite")));
        }
        sc.tolerance = t;
    }
    Ok(())
}

fn evolve_cmd(config: &Path, out: &Path, tolerance: Option<f64>, max_twice_s: u32) -> Result<(), CliError> {
    let mut sc = Scenario::load(config, max_twice_s)?;
    override_tolerance(&mut sc, tolerance)?;
    let ops = OperatorTriple::with_hbar(sc.label, sc.hbar);
    let ev = evolve::simulate(&sc, &ops)?;
    ensure_dir(out)?;
    if sc.outputs.iter().any(|o| o == TRAJECTORY_CSV) {
        write_trajectory(&artifact(out, TRAJECTORY_CSV), &ev.rows)?;
    }
    if sc.outputs.iter().any(|o| o == REPORT_JSON) {
        write_json(&artifact(out, REPORT_JSON), &ev.report)?;
    }
    let r = &ev.report;
    println!("max deviation {:e} over {} samples (tolerance {:e})", r.max_direction_deviation, r.samples, r.tolerance);
    if r.passed {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "max deviation {:e} exceeds tolerance {:e}",
            r.max_direction_deviation, r.tolerance
        )))
    }
}

fn verify_cmd(max_twice_s: u32, seed: u64, out: Option<&Path>, fault: Option<Fault>) -> Result<(), CliError> {
    if max_twice_s < 1 {
        return Err(CliError::config("--max-twice-s: must be at least 1"));
    }
    let report = match fault {
        None => verify::run(max_twice_s, seed, verify::standard),
        Some(Fault::FlipSy) => verify::run(max_twice_s, seed, verify::flipped_sy),
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::config(e.to_string()))?;
    println!("{text}");
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&artifact(dir, REPORT_JSON), &report)?;
    }
    let failures: Vec<String> = report
        .failures()
        .map(|f| format!("{}: {}", f.name, f.first_violation.as_deref().unwrap_or("violated")))
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("identity violated: {}", failures.join("; "))))
    }
}

fn stars_cmd(config: &Path, out: &Path, max_twice_s: u32) -> Result<(), CliError> {
    let cfg = StarsConfig::load(config, max_twice_s)?;
    let list = stars::compute(&cfg)?;
    ensure_dir(out)?;
    write_csv(
        &artifact(out, STARS_CSV),
        &["theta", "phi", "x", "y", "z"],
        list.stars.iter().map(|s| {
            let p = s.point.0;
            vec![num(s.angles.theta()), num(s.angles.phi()), num(p[0]), num(p[1]), num(p[2])]
        }),
    )?;
    match list.coherent {
        Some(a) => println!("{} stars; coherent along theta={}, phi={}", list.stars.len(), a.theta(), a.phi()),
        None => println!("{} stars; not coherent", list.stars.len()),
    }
    Ok(())
}

fn sweep_cmd(config: &Path, out: &Path, tolerance: Option<f64>, max_twice_s: u32, timing: bool) -> Result<(), CliError> {
    let mut sc = Scenario::load(config, max_twice_s)?;
    override_tolerance(&mut sc, tolerance)?;
    let plan = sc.sweep.clone().ok_or_else(|| CliError::config("sweep: the config has no [sweep] table"))?;
    let points = sweep::run(&sc, &plan, max_twice_s)?;
    ensure_dir(out)?;
    let mut header = vec!["point", plan.axis.name(), "dt_s", "max_deviation", "passed"];
    if timing {
        header.push("runtime_s");
    }
    write_csv(
        &artifact(out, SWEEP_CSV),
        &header,
        points.iter().enumerate().map(|(i, p)| {
            let mut row = vec![i.to_string(), num(p.value), num(p.dt), num(p.max_deviation), p.passed.to_string()];
            if timing {
                row.push(num(p.runtime_s));
            }
            row
        }),
    )?;
    let failed = points.iter().filter(|p| !p.passed).count();
    println!("{} sweep points, {failed} above tolerance {:e}", points.len(), sc.tolerance);
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failure(format!("{failed} sweep points exceed tolerance {:e}", sc.tolerance)))
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve { config, out, tolerance, seed: _, max_twice_s } => {
            evolve_cmd(&config, &out, tolerance, max_twice_s)
        }
        Command::Verify { max_twice_s, seed, out, inject_fault } => {
            verify_cmd(max_twice_s, seed, out.as_deref(), inject_fault)
        }
        Command::Stars { config, out, max_twice_s } => stars_cmd(&config, &out, max_twice_s),
        Command::Sweep { config, out, tolerance, seed: _, max_twice_s, timing } => {
            sweep_cmd(&config, &out, tolerance, max_twice_s, timing)
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and maps them to exit codes.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
