//! Piecewise-constant Boolean signal prefixes and labeled samples.

use std::collections::BTreeSet;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalSet};
use crate::rational::{format_rational, parse_rational, Rational};

pub type Valuation = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignalError {
    #[error("observation sequence is empty")]
    Empty,
    #[error("first observation must be at time 0, found {0}")]
    NonZeroStart(String),
    #[error("observation times must be strictly increasing ({0} after {1})")]
    NotIncreasing(String, String),
    #[error("last observation time {0} is not below the horizon {1}")]
    BeyondHorizon(String, String),
    #[error("horizon must be positive, found {0}")]
    BadHorizon(String),
    #[error("time {0} outside [0,{1})")]
    OutOfRange(String, String),
    #[error("invalid infix window [{0},{1}]")]
    BadWindow(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid time literal `{0}`")]
    Time(String),
    #[error("{which} prefix {index}: {source}")]
    Prefix {
        which: &'static str,
        index: usize,
        #[source]
        source: SignalError,
    },
    #[error("{which} prefix {index} has horizon {found}, expected {expected}")]
    HorizonMismatch { which: &'static str, index: usize, found: String, expected: String },
    #[error("{which} prefix {index} uses proposition `{prop}` outside the alphabet")]
    UnknownProposition { which: &'static str, index: usize, prop: String },
    #[error("positive prefix {positive} equals negative prefix {negative}")]
    Overlap { positive: usize, negative: usize },
    #[error("horizon must be positive, found {0}")]
    BadHorizon(String),
}

/// Timestamped observations `(t_i, δ_i)` together with the horizon `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub points: Vec<(Rational, Valuation)>,
    pub horizon: Rational,
}

impl Observation {
    pub fn new(points: Vec<(Rational, Valuation)>, horizon: Rational) -> Self {
        Observation { points, horizon }
    }
}

/// A function `[0, T)` to sets of propositions, constant between breakpoints.
/// Adjacent segments always carry distinct values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignalPrefix {
    horizon: Rational,
    segments: Vec<(Rational, Valuation)>,
}

impl SignalPrefix {
    pub fn from_observations(obs: &Observation) -> Result<Self, SignalError> {
        let t = &obs.horizon;
        if !t.is_positive() {
            return Err(SignalError::BadHorizon(format_rational(t)));
        }
        let first = obs.points.first().ok_or(SignalError::Empty)?;
        if !first.0.is_zero() {
            return Err(SignalError::NonZeroStart(format_rational(&first.0)));
        }
        for w in obs.points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(SignalError::NotIncreasing(format_rational(&w[1].0), format_rational(&w[0].0)));
            }
        }
        let last = &obs.points.last().expect("non-empty").0;
        if last >= t {
            return Err(SignalError::BeyondHorizon(format_rational(last), format_rational(t)));
        }
        let mut segments: Vec<(Rational, Valuation)> = Vec::with_capacity(obs.points.len());
        for (time, val) in &obs.points {
            if segments.last().is_none_or(|(_, v)| v != val) {
                segments.push((time.clone(), val.clone()));
            }
        }
        Ok(SignalPrefix { horizon: t.clone(), segments })
    }

    /// Convenience constructor from `(time, [props])` pairs.
    pub fn from_pairs<S: AsRef<str>>(horizon: Rational, pairs: &[(Rational, &[S])]) -> Result<Self, SignalError> {
        let points = pairs
            .iter()
            .map(|(t, ps)| (t.clone(), ps.iter().map(|p| p.as_ref().to_string()).collect()))
            .collect();
        Self::from_observations(&Observation::new(points, horizon))
    }

    pub fn horizon(&self) -> &Rational {
        &self.horizon
    }

    /// Segment start times and values, in order.
    pub fn segments(&self) -> &[(Rational, Valuation)] {
        &self.segments
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.segments.iter().map(|(t, _)| t)
    }

    fn segment_index(&self, t: &Rational) -> usize {
        self.segments.partition_point(|(s, _)| s <= t) - 1
    }

    pub fn value_at(&self, t: &Rational) -> Result<&Valuation, SignalError> {
        if t.is_negative() || t >= &self.horizon {
            return Err(SignalError::OutOfRange(format_rational(t), format_rational(&self.horizon)));
        }
        Ok(&self.segments[self.segment_index(t)].1)
    }

    fn segment_end(&self, k: usize) -> &Rational {
        self.segments.get(k + 1).map_or(&self.horizon, |(t, _)| t)
    }

    /// Maximal intervals on which `p` holds.
    pub fn base_intervals(&self, p: &str) -> IntervalSet {
        let pieces = (0..self.segments.len())
            .filter(|&k| self.segments[k].1.contains(p))
            .map(|k| Interval::new(self.segments[k].0.clone(), self.segment_end(k).clone()));
        IntervalSet::normalize(self.horizon.clone(), pieces)
    }

    pub fn propositions(&self) -> Valuation {
        self.segments.iter().flat_map(|(_, v)| v.iter().cloned()).collect()
    }

    /// Restriction to the closed window `[t1, t2]`, shifted to start at 0.
    pub fn infix(&self, t1: &Rational, t2: &Rational) -> Result<Infix, SignalError> {
        if t1.is_negative() || t1 > t2 || t2 >= &self.horizon {
            return Err(SignalError::BadWindow(format_rational(t1), format_rational(t2)));
        }
        Ok(self.window(t1, t2, true))
    }

    /// Restriction to the half-open window `[t1, T)`, shifted to start at 0.
    pub fn suffix(&self, t1: &Rational) -> Result<Infix, SignalError> {
        if t1.is_negative() || t1 >= &self.horizon {
            return Err(SignalError::BadWindow(format_rational(t1), format_rational(&self.horizon)));
        }
        Ok(self.window(t1, &self.horizon, false))
    }

    fn window(&self, t1: &Rational, t2: &Rational, closed: bool) -> Infix {
        let first = self.segment_index(t1);
        let mut segments = vec![(Rational::zero(), self.segments[first].1.clone())];
        for (t, v) in &self.segments[first + 1..] {
            if t > t2 || (t == t2 && !closed) {
                break;
            }
            segments.push((t - t1, v.clone()));
        }
        Infix { length: t2 - t1, closed, segments }
    }

    /// Whether `w` equals the window of the same shape starting at some `t'`.
    pub fn contains_infix(&self, w: &Infix) -> bool {
        self.infix_position(w).is_some()
    }

    pub fn infix_position(&self, w: &Infix) -> Option<Rational> {
        let t = &self.horizon;
        let max_start = t - &w.length;
        if max_start.is_negative() {
            return None;
        }
        // The first internal breakpoint of a non-constant window must land on
        // one of ours; a constant window can always be slid back to a segment
        // start, so these differences cover every alignment.
        let mut candidates: Vec<Rational> = Vec::new();
        for xb in self.breakpoints().chain(std::iter::once(t)) {
            for (wo, _) in &w.segments {
                candidates.push(xb - wo);
            }
        }
        candidates.push(Rational::zero());
        candidates.push(max_start.clone());
        candidates.sort();
        candidates.dedup();
        candidates.into_iter().find(|start| {
            if start.is_negative() || start > &max_start {
                return false;
            }
            let end = start + &w.length;
            if w.closed {
                end < *t && self.window(start, &end, true) == *w
            } else {
                self.window(start, &end, false) == *w
            }
        })
    }
}

/// A window of a prefix shifted to start at time 0. Closed windows cover
/// `[0, length]`; open ones cover `[0, length)`. `segments` lists the start
/// offset and value of every constant piece, so two windows are pointwise
/// equal exactly when they are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Infix {
    pub length: Rational,
    pub closed: bool,
    pub segments: Vec<(Rational, Valuation)>,
}

impl Infix {
    /// Value at offset `t`, if `t` lies in the domain.
    pub fn value_at(&self, t: &Rational) -> Option<&Valuation> {
        let inside = !t.is_negative() && (t < &self.length || (self.closed && t == &self.length));
        if !inside {
            return None;
        }
        let k = self.segments.partition_point(|(s, _)| s <= t) - 1;
        Some(&self.segments[k].1)
    }
}

/// A labeled set of prefixes over a common horizon and alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    horizon: Rational,
    propositions: BTreeSet<String>,
    positive: Vec<SignalPrefix>,
    negative: Vec<SignalPrefix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }
}

impl Sample {
    pub fn new(
        horizon: Rational,
        propositions: BTreeSet<String>,
        positive: Vec<SignalPrefix>,
        negative: Vec<SignalPrefix>,
    ) -> Result<Self, SampleError> {
        if !horizon.is_positive() {
            return Err(SampleError::BadHorizon(format_rational(&horizon)));
        }
        for (label, set) in [(Label::Positive, &positive), (Label::Negative, &negative)] {
            for (index, x) in set.iter().enumerate() {
                if x.horizon() != &horizon {
                    return Err(SampleError::HorizonMismatch {
                        which: label.name(),
                        index,
                        found: format_rational(x.horizon()),
                        expected: format_rational(&horizon),
                    });
                }
                if let Some(prop) = x.propositions().into_iter().find(|p| !propositions.contains(p)) {
                    return Err(SampleError::UnknownProposition { which: label.name(), index, prop });
                }
            }
        }
        for (i, x) in positive.iter().enumerate() {
            if let Some(j) = negative.iter().position(|y| y == x) {
                return Err(SampleError::Overlap { positive: i, negative: j });
            }
        }
        Ok(Sample { horizon, propositions, positive, negative })
    }

    pub fn from_json(text: &str) -> Result<Self, SampleError> {
        let raw: SampleJson = serde_json::from_str(text).map_err(|e| SampleError::Json(e.to_string()))?;
        let horizon = raw.horizon.value()?;
        let build = |which: &'static str, list: &[Vec<(TimeLit, Vec<String>)>]| {
            list.iter()
                .enumerate()
                .map(|(index, obs)| {
                    let points = obs
                        .iter()
                        .map(|(t, ps)| Ok((t.value()?, ps.iter().cloned().collect())))
                        .collect::<Result<Vec<_>, SampleError>>()?;
                    SignalPrefix::from_observations(&Observation::new(points, horizon.clone()))
                        .map_err(|source| SampleError::Prefix { which, index, source })
                })
                .collect::<Result<Vec<_>, SampleError>>()
        };
        let positive = build("positive", &raw.positive)?;
        let negative = build("negative", &raw.negative)?;
        Sample::new(horizon, raw.propositions.into_iter().collect(), positive, negative)
    }

    pub fn to_json(&self) -> String {
        let conv = |list: &[SignalPrefix]| {
            list.iter()
                .map(|x| {
                    x.segments()
                        .iter()
                        .map(|(t, v)| (TimeLit::Text(format_rational(t)), v.iter().cloned().collect()))
                        .collect()
                })
                .collect()
        };
        let raw = SampleJson {
            horizon: TimeLit::Text(format_rational(&self.horizon)),
            propositions: self.propositions.iter().cloned().collect(),
            positive: conv(&self.positive),
            negative: conv(&self.negative),
        };
        serde_json::to_string_pretty(&raw).expect("sample serializes")
    }

    pub fn horizon(&self) -> &Rational {
        &self.horizon
    }

    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn positive(&self) -> &[SignalPrefix] {
        &self.positive
    }

    pub fn negative(&self) -> &[SignalPrefix] {
        &self.negative
    }

    /// All prefixes, positives first.
    pub fn prefixes(&self) -> impl Iterator<Item = (Label, &SignalPrefix)> {
        self.positive
            .iter()
            .map(|x| (Label::Positive, x))
            .chain(self.negative.iter().map(|x| (Label::Negative, x)))
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum TimeLit {
    Text(String),
    Number(serde_json::Number),
}

impl TimeLit {
    fn value(&self) -> Result<Rational, SampleError> {
        let text = match self {
            TimeLit::Text(s) => s.clone(),
            TimeLit::Number(n) => n.to_string(),
        };
        parse_rational(&text).map_err(|_| SampleError::Time(text))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleJson {
    #[serde(rename = "T")]
    horizon: TimeLit,
    propositions: Vec<String>,
    positive: Vec<Vec<(TimeLit, Vec<String>)>>,
    negative: Vec<Vec<(TimeLit, Vec<String>)>>,
}
