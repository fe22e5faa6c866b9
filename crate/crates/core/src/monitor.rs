//! Offline monitoring: satisfaction interval sets of a formula over a prefix.

use num::{Signed, Zero};
use thiserror::Error;

use crate::formula::{DagLabel, Formula};
use crate::interval::{shift_back, Interval, IntervalError, IntervalSet};
use crate::rational::{format_rational, Rational};
use crate::signal::{Label, Sample, SignalPrefix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("formula uses proposition `{0}` outside the sample alphabet")]
    UnknownProposition(String),
    #[error("time {0} outside [0,{1})")]
    OutOfRange(String, String),
    #[error("prefix index {0} out of range ({1} prefixes)")]
    BadIndex(usize, usize),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// `F[a,b]` step: the back-shifted pieces and the resulting set.
pub fn finally_step(child: &IntervalSet, a: &Rational, b: &Rational) -> (Vec<Interval>, IntervalSet) {
    let t = child.horizon().clone();
    let shifted: Vec<Interval> = child.iter().filter_map(|i| shift_back(i, a, b, &t)).collect();
    let tail = Interval::new((&t - b).max(Rational::zero()), t.clone());
    let result = IntervalSet::normalize(t, shifted.iter().cloned().chain(std::iter::once(tail)));
    (shifted, result)
}

pub fn globally_step(child: &IntervalSet, a: &Rational, b: &Rational) -> (Vec<Interval>, IntervalSet) {
    let t = child.horizon().clone();
    let shifted: Vec<Interval> = child.complement().iter().filter_map(|i| shift_back(i, a, b, &t)).collect();
    let core = IntervalSet::normalize(t.clone(), shifted.iter().cloned()).complement();
    let tail = Interval::new((&t - a).max(Rational::zero()), t.clone());
    let result = IntervalSet::normalize(t, core.iter().cloned().chain(std::iter::once(tail)));
    (shifted, result)
}

/// Intermediate sets of the `U[a,b]` computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UntilTrace {
    /// Overlaps of the two operand sets.
    pub overlap: IntervalSet,
    /// Each overlap shifted back by `[a,b]` (empty shifts dropped).
    pub shifted: Vec<Interval>,
    /// Each shifted piece cut down to the left-operand interval containing
    /// its overlap.
    pub restricted: Vec<Interval>,
    pub tail: Option<Interval>,
    pub result: IntervalSet,
}

pub fn until_step(left: &IntervalSet, right: &IntervalSet, a: &Rational, b: &Rational) -> Result<UntilTrace, MonitorError> {
    let t = left.horizon().clone();
    let overlap = left.intersect(right)?;
    let mut shifted = Vec::new();
    let mut restricted = Vec::new();
    for k in overlap.iter() {
        let Some(s) = shift_back(k, a, b, &t) else { continue };
        let host = left
            .iter()
            .find(|j| j.lo <= k.lo && k.hi <= j.hi)
            .expect("overlap lies inside a left-operand interval");
        let cut = Interval::new((&s.lo).max(&host.lo).clone(), (&s.hi).min(&host.hi).clone());
        shifted.push(s);
        if !cut.is_empty() {
            restricted.push(cut);
        }
    }
    let tail = left.tail().map(|j| Interval::new((&t - b).max(j.lo.clone()), t.clone()));
    let result = IntervalSet::normalize(t, restricted.iter().cloned().chain(tail.iter().cloned()));
    Ok(UntilTrace { overlap, shifted, restricted, tail, result })
}

/// Satisfaction set of every DAG node of `phi` over `x`, in DAG order.
pub fn node_intervals(phi: &Formula, x: &SignalPrefix) -> Vec<IntervalSet> {
    let dag = phi.dag();
    let mut sets: Vec<IntervalSet> = Vec::with_capacity(dag.len());
    for node in dag.nodes() {
        let l = node.left.map(|k| &sets[k]);
        let r = node.right.map(|k| &sets[k]);
        let set = match &node.label {
            DagLabel::Prop(p) => x.base_intervals(p),
            DagLabel::NegProp(p) => x.base_intervals(p).complement(),
            DagLabel::And => l.unwrap().intersect(r.unwrap()).expect("common horizon"),
            DagLabel::Or => l.unwrap().union(r.unwrap()).expect("common horizon"),
            DagLabel::Finally(bd) => finally_step(l.unwrap(), bd.lo(), bd.hi()).1,
            DagLabel::Globally(bd) => globally_step(l.unwrap(), bd.lo(), bd.hi()).1,
            DagLabel::Until(bd) => until_step(l.unwrap(), r.unwrap(), bd.lo(), bd.hi()).expect("common horizon").result,
        };
        sets.push(set);
    }
    sets
}

/// Maximal intervals of `[0,T)` at which `phi` holds on `x`. Propositions
/// that never occur in `x` are false everywhere.
pub fn intervals(phi: &Formula, x: &SignalPrefix) -> IntervalSet {
    node_intervals(phi, x).pop().expect("formula has a root")
}

pub fn satisfies_at(phi: &Formula, x: &SignalPrefix, t: &Rational) -> Result<bool, MonitorError> {
    if t.is_negative() || t >= x.horizon() {
        return Err(MonitorError::OutOfRange(format_rational(t), format_rational(x.horizon())));
    }
    Ok(intervals(phi, x).contains(t))
}

pub fn check_alphabet(phi: &Formula, sample: &Sample) -> Result<(), MonitorError> {
    match phi.propositions().into_iter().find(|p| !sample.propositions().contains(p)) {
        Some(p) => Err(MonitorError::UnknownProposition(p)),
        None => Ok(()),
    }
}

/// Satisfaction set on the prefix at `index` (positives first, then negatives).
pub fn sample_intervals(phi: &Formula, sample: &Sample, index: usize) -> Result<IntervalSet, MonitorError> {
    check_alphabet(phi, sample)?;
    let x = sample.prefixes().nth(index).ok_or(MonitorError::BadIndex(index, sample.len()))?.1;
    Ok(intervals(phi, x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixVerdict {
    pub label: Label,
    /// Index within its own label group.
    pub index: usize,
    /// Whether this prefix is handled as required.
    pub ok: bool,
    /// A time at which the formula fails, when one exists.
    pub failing_time: Option<Rational>,
    pub intervals: IntervalSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepVerdict {
    pub prefixes: Vec<PrefixVerdict>,
}

impl SepVerdict {
    pub fn is_separating(&self) -> bool {
        self.prefixes.iter().all(|v| v.ok)
    }

    pub fn first_violation(&self) -> Option<&PrefixVerdict> {
        self.prefixes.iter().find(|v| !v.ok)
    }
}

/// Whether `phi` holds everywhere on every positive prefix and fails somewhere
/// on every negative one.
pub fn is_g_sep(phi: &Formula, sample: &Sample) -> Result<SepVerdict, MonitorError> {
    check_alphabet(phi, sample)?;
    let mut prefixes = Vec::with_capacity(sample.len());
    let mut counters = [0usize; 2];
    for (label, x) in sample.prefixes() {
        let set = intervals(phi, x);
        let failing_time = set.complement().intervals().first().map(|i| i.lo.clone());
        let slot = if label == Label::Positive { 0 } else { 1 };
        let full = set.is_full();
        prefixes.push(PrefixVerdict {
            label,
            index: counters[slot],
            ok: if label == Label::Positive { full } else { !full },
            failing_time,
            intervals: set,
        });
        counters[slot] += 1;
    }
    Ok(SepVerdict { prefixes })
}
