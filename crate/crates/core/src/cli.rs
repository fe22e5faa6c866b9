//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 negative answer (no
//! solution, not separating, not separable), 3 synthesis aborted.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::formula::Formula;
use crate::monitor::{check_alphabet, intervals, is_g_sep, MonitorError};
use crate::parser::{parse, print_decimal, ParseError};
use crate::rational::{format_decimal, format_rational, parse_rational, ParseRationalError, Rational};
use crate::separability::{is_k_infix_separable, SeparabilityError, SeparabilityReport};
use crate::signal::{Sample, SampleError};
use crate::solver::ExternalSolver;
use crate::synth::{synthesize, Outcome, Stats, SynthConfig, SynthError, DEFAULT_MAX_SIZE};
use crate::IntervalSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_ABORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mtl-synth", version, about = "Learn and check metric temporal logic formulas over signal prefixes")]
struct Cli {
    /// Print rationals in decimal notation instead of fractions.
    #[arg(long, global = true)]
    decimal: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a smallest formula separating the sample.
    Synthesize(SynthesizeArgs),
    /// Check whether a formula separates the sample.
    Check(FormulaArgs),
    /// Print where a formula holds on each prefix.
    Monitor(MonitorArgs),
    /// Decide whether any formula with the given lookahead can separate the sample.
    Separable(SeparableArgs),
}

#[derive(Debug, Args)]
struct SynthesizeArgs {
    #[arg(long)]
    sample: PathBuf,
    /// Upper bound on the formula's future reach.
    #[arg(long = "fr-bound")]
    fr_bound: String,
    #[arg(long = "max-size", default_value_t = DEFAULT_MAX_SIZE)]
    max_size: usize,
    /// Solver executable (defaults to $MTL_SYNTH_SOLVER, then `z3`).
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Per-query timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    json: bool,
    /// Write every solver query into this directory.
    #[arg(long = "dump-smt")]
    dump_smt: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FormulaArgs {
    #[arg(long)]
    sample: PathBuf,
    #[arg(long)]
    formula: String,
}

#[derive(Debug, Args)]
struct MonitorArgs {
    #[arg(long)]
    sample: PathBuf,
    #[arg(long)]
    formula: String,
    /// Only this prefix, counting positives first.
    #[arg(long = "prefix-index")]
    prefix_index: Option<usize>,
}

#[derive(Debug, Args)]
struct SeparableArgs {
    #[arg(long)]
    sample: PathBuf,
    #[arg(long = "fr-bound")]
    fr_bound: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot create {path}: {source}")]
    Create { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Sample { path: PathBuf, source: SampleError },
    #[error("bad formula: {0}")]
    Formula(#[from] ParseError),
    #[error("bad --fr-bound: {0}")]
    Bound(#[from] ParseRationalError),
    #[error("bad --timeout: {0}")]
    Timeout(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Separability(#[from] SeparabilityError),
    #[error("output error: {0}")]
    Output(#[from] std::io::Error),
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

struct Fmt {
    decimal: bool,
}

impl Fmt {
    fn rational(&self, r: &Rational) -> String {
        if self.decimal {
            format_decimal(r)
        } else {
            format_rational(r)
        }
    }

    fn formula(&self, f: &Formula) -> String {
        if self.decimal {
            print_decimal(f)
        } else {
            f.to_string()
        }
    }

    fn set(&self, s: &IntervalSet) -> String {
        if self.decimal {
            s.to_decimal_string()
        } else {
            s.to_string()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let fmt = Fmt { decimal: cli.decimal };
    match &cli.command {
        Command::Synthesize(a) => cmd_synthesize(a, &fmt, out),
        Command::Check(a) => cmd_check(a, &fmt, out),
        Command::Monitor(a) => cmd_monitor(a, &fmt, out),
        Command::Separable(a) => cmd_separable(a, &fmt, out),
    }
}

fn load_sample(path: &Path) -> Result<Sample, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    Sample::from_json(&text).map_err(|source| CliError::Sample { path: path.into(), source })
}

fn cmd_synthesize(a: &SynthesizeArgs, fmt: &Fmt, out: &mut dyn Write) -> Result<i32, CliError> {
    let sample = load_sample(&a.sample)?;
    let k = parse_rational(&a.fr_bound)?;
    let timeout = match a.timeout {
        None => None,
        Some(s) => Some(Duration::try_from_secs_f64(s).map_err(|e| CliError::Timeout(e.to_string()))?),
    };
    if let Some(dir) = &a.dump_smt {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Create { path: dir.clone(), source })?;
    }
    let solver = match &a.solver {
        Some(p) => ExternalSolver::new(p),
        None => ExternalSolver::from_env(),
    };
    let mut solver = solver.with_dump_dir(a.dump_smt.clone());
    let config = SynthConfig { max_size: a.max_size, timeout };
    let outcome = synthesize(&sample, &k, &config, &mut solver)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&outcome.to_json()).expect("JSON values serialize"))?;
    }
    match &outcome {
        Outcome::Found { formula, size, future_reach, stats } => {
            if !a.json {
                writeln!(out, "formula: {}", fmt.formula(formula))?;
                writeln!(out, "size: {size}")?;
                writeln!(out, "future reach: {}", fmt.rational(future_reach))?;
                write_stats(out, stats)?;
            }
            Ok(EXIT_OK)
        }
        Outcome::NoSolution { report } => {
            if !a.json {
                writeln!(out, "no solution: not K-infix-separable for K = {}", fmt.rational(&k))?;
                if let Some(i) = report.first_inseparable() {
                    writeln!(out, "negative prefix {i} has no window of length at most K absent from every positive prefix")?;
                }
            }
            Ok(EXIT_NEGATIVE)
        }
        Outcome::Aborted { reason, stats } => {
            if !a.json {
                writeln!(out, "aborted: {reason}")?;
                write_stats(out, stats)?;
            }
            Ok(EXIT_ABORTED)
        }
    }
}

fn write_stats(out: &mut dyn Write, stats: &Stats) -> std::io::Result<()> {
    writeln!(out, "solver calls: {} ({:.3}s)", stats.solver_calls, stats.seconds)?;
    for s in &stats.sizes {
        writeln!(
            out,
            "  size {}: {} in {:.3}s ({} atoms, {} variables)",
            s.size, s.verdict, s.seconds, s.atoms, s.variables
        )?;
    }
    Ok(())
}

fn parse_for(sample: &Sample, text: &str) -> Result<Formula, CliError> {
    let phi = parse(text)?;
    check_alphabet(&phi, sample)?;
    Ok(phi)
}

fn cmd_check(a: &FormulaArgs, fmt: &Fmt, out: &mut dyn Write) -> Result<i32, CliError> {
    let sample = load_sample(&a.sample)?;
    let phi = parse_for(&sample, &a.formula)?;
    let verdict = is_g_sep(&phi, &sample)?;
    for p in &verdict.prefixes {
        let status = if p.ok { "ok" } else { "FAIL" };
        let at = match &p.failing_time {
            Some(t) => format!("fails at {}", fmt.rational(t)),
            None => "holds everywhere".to_string(),
        };
        writeln!(out, "{} {}: {status} ({at})", p.label.name(), p.index)?;
    }
    if verdict.is_separating() {
        writeln!(out, "separating")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "not separating")?;
        Ok(EXIT_NEGATIVE)
    }
}

fn cmd_monitor(a: &MonitorArgs, fmt: &Fmt, out: &mut dyn Write) -> Result<i32, CliError> {
    let sample = load_sample(&a.sample)?;
    let phi = parse_for(&sample, &a.formula)?;
    match a.prefix_index {
        Some(i) => {
            let x = sample.prefixes().nth(i).ok_or(MonitorError::BadIndex(i, sample.len()))?.1;
            writeln!(out, "{}", fmt.set(&intervals(&phi, x)))?;
        }
        None => {
            let mut counts = [0usize; 2];
            for (label, x) in sample.prefixes() {
                let slot = &mut counts[label as usize];
                writeln!(out, "{} {}: {}", label.name(), slot, fmt.set(&intervals(&phi, x)))?;
                *slot += 1;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_separable(a: &SeparableArgs, fmt: &Fmt, out: &mut dyn Write) -> Result<i32, CliError> {
    let sample = load_sample(&a.sample)?;
    let k = parse_rational(&a.fr_bound)?;
    let report = is_k_infix_separable(&sample, &k)?;
    writeln!(out, "{}", if report.is_separable() { "yes" } else { "no" })?;
    write_witnesses(out, fmt, &report)?;
    Ok(if report.is_separable() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn write_witnesses(out: &mut dyn Write, fmt: &Fmt, report: &SeparabilityReport) -> std::io::Result<()> {
    for (i, w) in report.witnesses.iter().enumerate() {
        match w {
            Some(w) => {
                let close = if w.infix.closed { "]" } else { ")" };
                writeln!(out, "negative {i}: window [{},{}{close}", fmt.rational(&w.t1), fmt.rational(&w.t2))?;
            }
            None => writeln!(out, "negative {i}: no distinguishing window")?,
        }
    }
    Ok(())
}
