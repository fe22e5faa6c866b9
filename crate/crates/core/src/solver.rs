//! External SMT solver driven over SMT-LIB2 on standard input/output.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use thiserror::Error;
use wait_timeout::ChildExt;

use crate::lra::{emit_smtlib, parse_model, Context, LraError, LraFormula, Model};

pub const SOLVER_ENV: &str = "MTL_SYNTH_SOLVER";

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot start solver `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver reported an error: {0}")]
    Protocol(String),
    #[error("solver model does not satisfy the query (violated under exact evaluation)")]
    ModelRejected,
    #[error(transparent)]
    Lra(#[from] LraError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

/// Anything that can decide satisfiability of an LRA query.
pub trait Backend {
    fn check_sat(&mut self, phi: &LraFormula, ctx: &Context, timeout: Option<Duration>) -> Result<SatResult, SolverError>;
}

/// One subprocess per query.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    program: PathBuf,
    args: Vec<String>,
    dump_dir: Option<PathBuf>,
    queries: usize,
}

fn default_args(program: &Path) -> Vec<String> {
    let name = program.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
    if name.contains("z3") {
        vec!["-in".into()]
    } else if name.contains("cvc") {
        vec!["--lang=smt2".into()]
    } else {
        Vec::new()
    }
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        let program = program.into();
        let args = default_args(&program);
        ExternalSolver { program, args, dump_dir: None, queries: 0 }
    }

    /// Solver named by the environment, falling back to `z3` on the `PATH`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(SOLVER_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("z3")))
    }

    pub fn with_args(mut self, args: Vec<String>) -> Self {
        self.args = args;
        self
    }

    pub fn with_dump_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.dump_dir = dir;
        self
    }

    pub fn program(&self) -> &Path {
        &self.program
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Runs a raw script and returns the solver's standard output.
    pub fn run_script(&self, script: &str, timeout: Option<Duration>) -> Result<Option<String>, SolverError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| SolverError::Spawn { program: self.program.display().to_string(), source })?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = script.to_string();
        let writer = thread::spawn(move || stdin.write_all(input.as_bytes()));
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut s = String::new();
            stdout.read_to_string(&mut s).map(|_| s)
        });
        let mut stderr = child.stderr.take().expect("piped stderr");
        let err_reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });
        let finished = match timeout {
            Some(limit) => child.wait_timeout(limit)?.is_some(),
            None => {
                child.wait()?;
                true
            }
        };
        if !finished {
            let _ = child.kill();
            let _ = child.wait();
            let _ = writer.join();
            let _ = reader.join();
            let _ = err_reader.join();
            return Ok(None);
        }
        // a solver that exits early may close its input; that is not our error
        let _ = writer.join();
        let out = reader.join().expect("reader thread")?;
        let err = err_reader.join().expect("stderr thread");
        if out.trim().is_empty() && !err.trim().is_empty() {
            return Err(SolverError::Protocol(err.trim().to_string()));
        }
        Ok(Some(out))
    }

    fn dump(&self, script: &str) -> Result<(), SolverError> {
        if let Some(dir) = &self.dump_dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("query_{:03}.smt2", self.queries)), script)?;
        }
        Ok(())
    }
}

/// Classifies solver output by its first response line.
pub fn classify(output: &str) -> Result<SatResult, SolverError> {
    let mut lines = output.lines().map(str::trim).filter(|l| !l.is_empty());
    let first = lines.next().unwrap_or("");
    match first {
        "sat" => {
            let rest: Vec<&str> = output.trim_start().splitn(2, '\n').collect();
            let body = rest.get(1).copied().unwrap_or("");
            if body.contains("(error") {
                return Err(SolverError::Protocol(body.trim().to_string()));
            }
            Ok(SatResult::Sat(parse_model(body)?))
        }
        "unsat" => Ok(SatResult::Unsat),
        "unknown" => Ok(SatResult::Unknown("solver answered unknown".into())),
        "" => Err(SolverError::Protocol("empty solver output".into())),
        other => Err(SolverError::Protocol(other.to_string())),
    }
}

impl Backend for ExternalSolver {
    fn check_sat(&mut self, phi: &LraFormula, ctx: &Context, timeout: Option<Duration>) -> Result<SatResult, SolverError> {
        let script = emit_smtlib(phi, ctx)?;
        self.queries += 1;
        self.dump(&script)?;
        let Some(output) = self.run_script(&script, timeout)? else {
            return Ok(SatResult::Unknown("timeout".into()));
        };
        let result = classify(&output)?;
        if let SatResult::Sat(model) = &result {
            validate(phi, ctx, model)?;
        }
        Ok(result)
    }
}

/// Checks that `model` covers the query's variables and satisfies it exactly.
pub fn validate(phi: &LraFormula, ctx: &Context, model: &Model) -> Result<(), SolverError> {
    let used: std::collections::BTreeMap<_, _> = phi
        .variables()
        .into_keys()
        .filter_map(|v| ctx.declarations().get(&v).map(|s| (v, *s)))
        .collect();
    model.require(&used)?;
    if phi.eval(model)? {
        Ok(())
    } else {
        Err(SolverError::ModelRejected)
    }
}
