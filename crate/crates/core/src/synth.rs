//! Iterative deepening over formula size.

use std::time::{Duration, Instant};

use serde_json::{json, Value};
use thiserror::Error;

use crate::encoder::{decode, encode, DecodeError, EncodeError};
use crate::formula::Formula;
use crate::lra::emit_smtlib;
use crate::monitor::{is_g_sep, MonitorError};
use crate::rational::{format_rational, Rational};
use crate::separability::{is_k_infix_separable, SeparabilityError, SeparabilityReport};
use crate::signal::Sample;
use crate::solver::{Backend, SatResult, SolverError};

pub const DEFAULT_MAX_SIZE: usize = 6;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("maximum size must be at least 1")]
    BadMaxSize,
    #[error(transparent)]
    Separability(#[from] SeparabilityError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot decode solver model: {0}")]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error("decoded formula `{formula}` failed verification: {reason}")]
    Verification { formula: String, reason: String, script: Box<String> },
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub max_size: usize,
    pub timeout: Option<Duration>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { max_size: DEFAULT_MAX_SIZE, timeout: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeStat {
    pub size: usize,
    pub verdict: &'static str,
    pub seconds: f64,
    pub atoms: usize,
    pub variables: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub sizes: Vec<SizeStat>,
    pub solver_calls: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Found { formula: Formula, size: usize, future_reach: Rational, stats: Stats },
    NoSolution { report: SeparabilityReport },
    Aborted { reason: String, stats: Stats },
}

/// Smallest formula with lookahead at most `k` that holds everywhere on the
/// positive prefixes and fails somewhere on each negative one.
pub fn synthesize(
    sample: &Sample,
    k: &Rational,
    config: &SynthConfig,
    backend: &mut dyn Backend,
) -> Result<Outcome, SynthError> {
    if config.max_size == 0 {
        return Err(SynthError::BadMaxSize);
    }
    let report = is_k_infix_separable(sample, k)?;
    if !report.is_separable() {
        return Ok(Outcome::NoSolution { report });
    }
    let start = Instant::now();
    let mut stats = Stats::default();
    for n in 1..=config.max_size {
        let enc = encode(sample, n, k)?;
        let t0 = Instant::now();
        let result = backend.check_sat(&enc.formula, &enc.ctx, config.timeout)?;
        stats.solver_calls += 1;
        let verdict = match &result {
            SatResult::Sat(_) => "sat",
            SatResult::Unsat => "unsat",
            SatResult::Unknown(_) => "unknown",
        };
        stats.sizes.push(SizeStat {
            size: n,
            verdict,
            seconds: t0.elapsed().as_secs_f64(),
            atoms: enc.formula.atom_count(),
            variables: enc.ctx.declarations().len(),
        });
        match result {
            SatResult::Unsat => continue,
            SatResult::Unknown(reason) => {
                stats.seconds = start.elapsed().as_secs_f64();
                return Ok(Outcome::Aborted { reason: format!("solver gave up at size {n}: {reason}"), stats });
            }
            SatResult::Sat(model) => {
                let formula = decode(&model, &enc.layout)?;
                let fail = |reason: String| SynthError::Verification {
                    formula: formula.to_string(),
                    reason,
                    script: Box::new(emit_smtlib(&enc.formula, &enc.ctx).unwrap_or_default()),
                };
                let verdict = is_g_sep(&formula, sample)?;
                if let Some(v) = verdict.first_violation() {
                    return Err(fail(format!("not separating on {:?} prefix {}", v.label, v.index)));
                }
                let fr = formula.future_reach();
                if &fr > k {
                    return Err(fail(format!("lookahead {} exceeds {}", format_rational(&fr), format_rational(k))));
                }
                let size = formula.size();
                if size > n {
                    return Err(fail(format!("size {size} exceeds encoded size {n}")));
                }
                stats.seconds = start.elapsed().as_secs_f64();
                return Ok(Outcome::Found { formula, size, future_reach: fr, stats });
            }
        }
    }
    stats.seconds = start.elapsed().as_secs_f64();
    Ok(Outcome::Aborted {
        reason: format!("a separating formula exists but none of size <= {} was found", config.max_size),
        stats,
    })
}

fn stats_json(stats: &Stats) -> Value {
    json!({
        "solver_calls": stats.solver_calls,
        "seconds": stats.seconds,
        "sizes": stats.sizes.iter().map(|s| json!({
            "size": s.size,
            "verdict": s.verdict,
            "seconds": s.seconds,
            "atoms": s.atoms,
            "variables": s.variables,
        })).collect::<Vec<_>>(),
    })
}

impl Outcome {
    pub fn to_json(&self) -> Value {
        match self {
            Outcome::Found { formula, size, future_reach, stats } => json!({
                "schema": 1,
                "status": "found",
                "formula": formula.to_string(),
                "size": size,
                "future_reach": format_rational(future_reach),
                "stats": stats_json(stats),
            }),
            Outcome::NoSolution { report } => json!({
                "schema": 1,
                "status": "no_solution",
                "reason": "not K-infix-separable",
                "inseparable_negative": report.first_inseparable(),
            }),
            Outcome::Aborted { reason, stats } => json!({
                "schema": 1,
                "status": "aborted",
                "reason": reason,
                "stats": stats_json(stats),
            }),
        }
    }
}
