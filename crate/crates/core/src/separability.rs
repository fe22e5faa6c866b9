//! Existence check: can any bounded-lookahead formula separate the sample?
//!
//! A sample is K-infix-separable when every negative prefix contains a window
//! of length at most K that appears in no positive prefix.

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, int, Rational};
use crate::signal::{Infix, Sample, SignalPrefix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparabilityError {
    #[error("lookahead bound must be non-negative, found {0}")]
    NegativeBound(String),
}

/// A window `[t1, t2]` of a negative prefix that occurs in no positive prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub t1: Rational,
    pub t2: Rational,
    pub infix: Infix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparabilityReport {
    /// One entry per negative prefix, `None` when every short window of that
    /// prefix also occurs in some positive prefix.
    pub witnesses: Vec<Option<Witness>>,
}

impl SeparabilityReport {
    pub fn is_separable(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }

    pub fn first_inseparable(&self) -> Option<usize> {
        self.witnesses.iter().position(Option::is_none)
    }
}

pub fn is_k_infix_separable(sample: &Sample, k: &Rational) -> Result<SeparabilityReport, SeparabilityError> {
    if k.is_negative() {
        return Err(SeparabilityError::NegativeBound(format_rational(k)));
    }
    let witnesses = sample.negative().iter().map(|y| distinguishing_window(y, sample.positive(), k)).collect();
    Ok(SeparabilityReport { witnesses })
}

pub fn infix_occurs_in(w: &Infix, x: &SignalPrefix) -> bool {
    x.contains_infix(w)
}

/// Start times at which the longest admissible window of `y` can change
/// whether it occurs in some positive prefix. Occurrence of the window at
/// `t1` is decided by alignments `t' = t1 + x_c - y_b`; the outcome can only
/// flip where a window end meets a breakpoint, so it is constant between the
/// returned critical values and probing each value plus the midpoints is
/// exhaustive.
fn start_candidates(y: &SignalPrefix, positives: &[SignalPrefix], k: &Rational) -> Vec<Rational> {
    let t = y.horizon();
    let ys: Vec<&Rational> = y.breakpoints().chain(std::iter::once(t)).collect();
    let mut diffs: Vec<Rational> = vec![Rational::zero()];
    for x in positives {
        let xs: Vec<&Rational> = x.breakpoints().chain(std::iter::once(x.horizon())).collect();
        for c in &xs {
            for d in &xs {
                diffs.push(*c - *d);
            }
        }
    }
    diffs.sort();
    diffs.dedup();
    let mut crit: Vec<Rational> = vec![Rational::zero(), t - k];
    for yb in &ys {
        for d in &diffs {
            let v = *yb + d;
            crit.push(&v - k);
            crit.push(v);
        }
    }
    crit.retain(|v| !v.is_negative() && v < t);
    crit.sort();
    crit.dedup();
    let two = int(2);
    let mut out = Vec::with_capacity(crit.len() * 2);
    for (i, c) in crit.iter().enumerate() {
        out.push(c.clone());
        let next = crit.get(i + 1).unwrap_or(t);
        out.push((c + next) / &two);
    }
    out
}

fn distinguishing_window(y: &SignalPrefix, positives: &[SignalPrefix], k: &Rational) -> Option<Witness> {
    let t = y.horizon();
    let absent = |w: &Infix| positives.iter().all(|x| !x.contains_infix(w));
    for t1 in start_candidates(y, positives, k) {
        let end = &t1 + k;
        if &end < t {
            let w = y.infix(&t1, &end).expect("window inside prefix");
            if absent(&w) {
                return Some(Witness { t1, t2: end, infix: w });
            }
            continue;
        }
        // the window may run up to the horizon; look for a concrete closed end
        if !absent(&y.suffix(&t1).expect("start inside prefix")) {
            continue;
        }
        let mut gap = t - &t1;
        for _ in 0..64 {
            gap /= int(2);
            let t2 = t - &gap;
            let w = y.infix(&t1, &t2).expect("window inside prefix");
            if absent(&w) {
                return Some(Witness { t1, t2, infix: w });
            }
        }
    }
    None
}
