//! Sets of half-open time intervals inside a horizon `[0, T)`.

use std::fmt;

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::{format_decimal, format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(String, String),
    #[error("shift bounds [{0},{1}] must satisfy 0 <= a <= b")]
    InvalidShift(String, String),
}

/// Half-open interval `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.lo <= t && t < &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Sorted, pairwise disjoint and non-adjacent non-empty intervals, all within
/// `[0, T)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    horizon: Rational,
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty(horizon: Rational) -> Self {
        IntervalSet { horizon, intervals: Vec::new() }
    }

    pub fn full(horizon: Rational) -> Self {
        let intervals = if horizon.is_positive() {
            vec![Interval::new(Rational::zero(), horizon.clone())]
        } else {
            Vec::new()
        };
        IntervalSet { horizon, intervals }
    }

    /// Normalizes an arbitrary list: clips to `[0, T)`, drops empty pieces,
    /// and merges overlapping or touching intervals.
    pub fn normalize(horizon: Rational, raw: impl IntoIterator<Item = Interval>) -> Self {
        let zero = Rational::zero();
        let mut items: Vec<Interval> = raw
            .into_iter()
            .map(|i| Interval::new(i.lo.max(zero.clone()), i.hi.min(horizon.clone())))
            .filter(|i| !i.is_empty())
            .collect();
        items.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for i in items {
            match out.last_mut() {
                Some(last) if i.lo <= last.hi => {
                    if i.hi > last.hi {
                        last.hi = i.hi;
                    }
                }
                _ => out.push(i),
            }
        }
        IntervalSet { horizon, intervals: out }
    }

    pub fn from_pairs(horizon: Rational, pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        Self::normalize(horizon, pairs.into_iter().map(|(l, r)| Interval::new(l, r)))
    }

    pub fn horizon(&self) -> &Rational {
        &self.horizon
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// True when the set is exactly `{[0, T)}`.
    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].lo.is_zero() && self.intervals[0].hi == self.horizon
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let idx = self.intervals.partition_point(|i| &i.hi <= t);
        self.intervals.get(idx).is_some_and(|i| i.contains(t))
    }

    /// The interval `[t, T)` that reaches the horizon, if any.
    pub fn tail(&self) -> Option<&Interval> {
        self.intervals.last().filter(|i| i.hi == self.horizon)
    }

    fn check(&self, other: &IntervalSet) -> Result<(), IntervalError> {
        if self.horizon != other.horizon {
            return Err(IntervalError::HorizonMismatch(
                format_rational(&self.horizon),
                format_rational(&other.horizon),
            ));
        }
        Ok(())
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = Rational::zero();
        for i in &self.intervals {
            if i.lo > cursor {
                out.push(Interval::new(cursor.clone(), i.lo.clone()));
            }
            cursor = i.hi.clone();
        }
        if cursor < self.horizon {
            out.push(Interval::new(cursor, self.horizon.clone()));
        }
        IntervalSet { horizon: self.horizon.clone(), intervals: out }
    }

    pub fn union(&self, other: &IntervalSet) -> Result<IntervalSet, IntervalError> {
        self.check(other)?;
        Ok(Self::normalize(
            self.horizon.clone(),
            self.intervals.iter().chain(other.intervals.iter()).cloned(),
        ))
    }

    pub fn intersect(&self, other: &IntervalSet) -> Result<IntervalSet, IntervalError> {
        self.check(other)?;
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = (&a[i].lo).max(&b[j].lo);
            let hi = (&a[i].hi).min(&b[j].hi);
            if lo < hi {
                out.push(Interval::new(lo.clone(), hi.clone()));
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces come from disjoint non-adjacent inputs, so they are already maximal
        Ok(IntervalSet { horizon: self.horizon.clone(), intervals: out })
    }

    /// Shifts every interval back by `[a, b]`: `[l, r)` becomes
    /// `[max(0, l - b), r - a)` clipped to `[0, T)`. Empty results are
    /// dropped; the result is not merged.
    pub fn minkowski_minus(&self, a: &Rational, b: &Rational) -> Result<Vec<Interval>, IntervalError> {
        if a.is_negative() || a > b {
            return Err(IntervalError::InvalidShift(format_rational(a), format_rational(b)));
        }
        Ok(self.intervals.iter().filter_map(|i| shift_back(i, a, b, &self.horizon)).collect())
    }

    pub fn to_decimal_string(&self) -> String {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|i| format!("[{},{})", format_decimal(&i.lo), format_decimal(&i.hi)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

pub(crate) fn shift_back(i: &Interval, a: &Rational, b: &Rational, horizon: &Rational) -> Option<Interval> {
    let zero = Rational::zero();
    let lo = (&i.lo - b).max(zero);
    let hi = (&i.hi - a).min(horizon.clone());
    (lo < hi).then(|| Interval::new(lo, hi))
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl<'a> IntoIterator for &'a IntervalSet {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.intervals.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn set(t: i64, pairs: &[(i64, i64)]) -> IntervalSet {
        IntervalSet::from_pairs(int(t), pairs.iter().map(|&(l, r)| (int(l), int(r))))
    }

    fn list(pairs: &[(i64, i64)]) -> Vec<Interval> {
        pairs.iter().map(|&(l, r)| Interval::new(int(l), int(r))).collect()
    }

    #[test]
    fn complement_examples() {
        assert_eq!(set(7, &[(0, 4), (6, 7)]).complement(), set(7, &[(4, 6)]));
        assert_eq!(set(7, &[(1, 4), (6, 7)]).complement(), set(7, &[(0, 1), (4, 6)]));
        assert_eq!(set(5, &[]).complement(), set(5, &[(0, 5)]));
    }

    #[test]
    fn union_examples() {
        let u = set(7, &[(1, 4), (6, 7)]).union(&set(7, &[(3, 5), (6, 7)])).unwrap();
        assert_eq!(u, set(7, &[(1, 5), (6, 7)]));
        assert_eq!(set(4, &[(0, 1)]).union(&set(4, &[(1, 2)])).unwrap(), set(4, &[(0, 2)]));
        assert!(set(4, &[]).union(&set(5, &[])).is_err());
    }

    #[test]
    fn intersect_examples() {
        let i = set(9, &[(1, 3), (5, 8)]).intersect(&set(9, &[(4, 6), (7, 9)])).unwrap();
        assert_eq!(i, set(9, &[(5, 6), (7, 8)]));
        assert!(set(9, &[(1, 3)]).intersect(&set(9, &[])).unwrap().is_empty());
        // touching intervals share no point
        assert!(set(9, &[(1, 3)]).intersect(&set(9, &[(3, 4)])).unwrap().is_empty());
    }

    #[test]
    fn minkowski_examples() {
        let s = set(7, &[(1, 4), (6, 7)]);
        assert_eq!(s.minkowski_minus(&int(1), &int(4)).unwrap(), list(&[(0, 3), (2, 6)]));
        assert_eq!(set(7, &[(5, 6)]).minkowski_minus(&int(0), &int(0)).unwrap(), list(&[(5, 6)]));
        assert!(set(7, &[(0, 1)]).minkowski_minus(&int(2), &int(3)).unwrap().is_empty());
        assert!(s.minkowski_minus(&int(2), &int(1)).is_err());
        assert!(s.minkowski_minus(&int(-1), &int(1)).is_err());
    }

    #[test]
    fn membership_and_display() {
        let s = set(6, &[(0, 4), (5, 6)]);
        assert_eq!(s.to_string(), "{[0,4),[5,6)}");
        assert!(s.contains(&int(0)));
        assert!(!s.contains(&int(4)));
        assert!(s.contains(&int(5)));
        assert!(!s.contains(&int(6)));
        assert!(set(6, &[(0, 6)]).is_full());
        assert_eq!(s.tail(), Some(&Interval::new(int(5), int(6))));
    }
}
