//! Shared generators and independent reference implementations for tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mtl_synth::formula::{Formula, Node, TimeBound};
use mtl_synth::interval::IntervalSet;
use mtl_synth::monitor;
use mtl_synth::rational::{int, ratio, rational_gcd, Rational};
use mtl_synth::signal::{Sample, SignalPrefix, Valuation};
use num::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn props(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn prefix(t: Rational, pairs: &[(Rational, &[&str])]) -> SignalPrefix {
    SignalPrefix::from_pairs(t, pairs).unwrap()
}

/// The running example: p on [0,2)∪[3,6), q on [0,1)∪[2,4), T = 6.
pub fn u1() -> SignalPrefix {
    prefix(
        int(6),
        &[
            (int(0), &["p", "q"]),
            (int(1), &["p"]),
            (int(2), &["q"]),
            (int(3), &["p", "q"]),
            (int(4), &["p"]),
        ],
    )
}

/// Positive `{q}` then `{}` from 2, negative constantly `{q}`, T = 4.
pub fn existence_sample() -> Sample {
    let x = prefix(int(4), &[(int(0), &["q"]), (int(2), &[])]);
    let y = prefix(int(4), &[(int(0), &["q"])]);
    Sample::new(int(4), props(&["q"]), vec![x], vec![y]).unwrap()
}

/// Positive constantly `{p}`, negative `{p}` then `{}` from 1, T = 2.
pub fn size_one_sample() -> Sample {
    let x = prefix(int(2), &[(int(0), &["p"])]);
    let y = prefix(int(2), &[(int(0), &["p"]), (int(1), &[])]);
    Sample::new(int(2), props(&["p"]), vec![x], vec![y]).unwrap()
}

pub fn solver_available() -> bool {
    let program = std::env::var("MTL_SYNTH_SOLVER").unwrap_or_else(|_| "z3".into());
    std::process::Command::new(program)
        .arg("-version")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .is_ok()
}

// ---------------------------------------------------------------- generators

/// Random rational in `[0, max]` with denominator dividing `den`.
pub fn rand_rational(r: &mut StdRng, max: i64, den: i64) -> Rational {
    ratio(r.gen_range(0..=max * den), den)
}

pub fn rand_bound(r: &mut StdRng, max: i64, den: i64) -> TimeBound {
    let a = rand_rational(r, max, den);
    let b = rand_rational(r, max, den);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    TimeBound::new(lo, hi).unwrap()
}

/// Random formula tree with at most `budget` nodes (a negated proposition
/// counts as two).
pub fn rand_formula(r: &mut StdRng, alphabet: &[&str], budget: usize, max_bound: i64, den: i64) -> Formula {
    let atom = |r: &mut StdRng| Formula::prop(alphabet[r.gen_range(0..alphabet.len())]);
    if budget <= 1 {
        return atom(r);
    }
    match r.gen_range(0..8) {
        0 => atom(r),
        1 => Formula::neg_prop(alphabet[r.gen_range(0..alphabet.len())]),
        2 => Formula::finally(rand_bound(r, max_bound, den), rand_formula(r, alphabet, budget - 1, max_bound, den)),
        3 => Formula::globally(rand_bound(r, max_bound, den), rand_formula(r, alphabet, budget - 1, max_bound, den)),
        k => {
            if budget < 3 {
                return atom(r);
            }
            let left_budget = r.gen_range(1..=budget - 2);
            let l = rand_formula(r, alphabet, left_budget, max_bound, den);
            let rr = rand_formula(r, alphabet, budget - 1 - left_budget, max_bound, den);
            match k {
                4 | 5 => Formula::and(l, rr),
                6 => Formula::or(l, rr),
                _ => Formula::until(rand_bound(r, max_bound, den), l, rr),
            }
        }
    }
}

/// Random prefix with at most `max_segments` segments, breakpoints on a
/// `1/den` grid.
pub fn rand_prefix(r: &mut StdRng, alphabet: &[&str], t: &Rational, max_segments: usize, den: i64) -> SignalPrefix {
    let ticks: i64 = (t * int(den)).to_integer().try_into().unwrap();
    let segs = r.gen_range(1..=max_segments).min(ticks as usize);
    let mut cuts: BTreeSet<i64> = BTreeSet::new();
    while cuts.len() < segs - 1 {
        cuts.insert(r.gen_range(1..ticks));
    }
    let mut points = vec![(Rational::zero(), rand_valuation(r, alphabet))];
    for c in cuts {
        points.push((ratio(c, den), rand_valuation(r, alphabet)));
    }
    SignalPrefix::from_observations(&mtl_synth::signal::Observation::new(points, t.clone())).unwrap()
}

pub fn rand_valuation(r: &mut StdRng, alphabet: &[&str]) -> Valuation {
    alphabet.iter().filter(|_| r.gen_bool(0.5)).map(|s| s.to_string()).collect()
}

/// Extends `x` to horizon `t_new` with random extra segments.
pub fn rand_extension(r: &mut StdRng, x: &SignalPrefix, alphabet: &[&str], t_new: &Rational, den: i64) -> SignalPrefix {
    let mut points: Vec<(Rational, Valuation)> = x.segments().to_vec();
    let t = x.horizon();
    let extra: i64 = ((t_new - t) * int(den)).to_integer().try_into().unwrap();
    let mut cuts: BTreeSet<i64> = BTreeSet::new();
    for _ in 0..r.gen_range(0..=2) {
        if extra > 0 {
            cuts.insert(r.gen_range(0..extra));
        }
    }
    for c in cuts {
        points.push((t + ratio(c, den), rand_valuation(r, alphabet)));
    }
    SignalPrefix::from_observations(&mtl_synth::signal::Observation::new(points, t_new.clone())).unwrap()
}

// ------------------------------------------------------- pointwise semantics

fn clip(values: impl IntoIterator<Item = Rational>, t: &Rational) -> BTreeSet<Rational> {
    values.into_iter().filter(|v| !v.is_negative() && v <= t).collect()
}

/// Superset of the points where the truth value of `phi` over `x` can change.
pub fn critical_points(phi: &Formula, x: &SignalPrefix) -> BTreeSet<Rational> {
    let t = x.horizon();
    let shifted = |base: &BTreeSet<Rational>, bd: &TimeBound| {
        let mut all: Vec<Rational> = base.iter().cloned().collect();
        for v in base {
            all.push(v - bd.lo());
            all.push(v - bd.hi());
        }
        all.push(t - bd.lo());
        all.push(t - bd.hi());
        clip(all, t)
    };
    match phi.node() {
        Node::Prop(_) | Node::NegProp(_) => {
            clip(x.breakpoints().cloned().chain([Rational::zero(), t.clone()]), t)
        }
        Node::And(l, r) | Node::Or(l, r) => {
            let mut s = critical_points(l, x);
            s.extend(critical_points(r, x));
            s
        }
        Node::Finally(bd, c) | Node::Globally(bd, c) => shifted(&critical_points(c, x), bd),
        Node::Until(bd, l, r) => {
            let mut s = critical_points(l, x);
            s.extend(critical_points(r, x));
            shifted(&s, bd)
        }
    }
}

/// Candidate witnesses for a quantifier over the closed window `[lo, hi]`
/// intersected with `[0, T)`: truth values are constant on `[β, β')` for
/// consecutive critical points, so the window's left end and every critical
/// point inside it suffice.
fn window_points(lo: &Rational, hi: &Rational, crit: &BTreeSet<Rational>, t: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    if lo < t {
        out.push(lo.clone());
    }
    out.extend(crit.iter().filter(|b| *b > lo && *b <= hi && *b < t).cloned());
    out
}

/// Direct evaluation of the weak finite semantics at time `t`.
pub fn holds(phi: &Formula, x: &SignalPrefix, t: &Rational) -> bool {
    let horizon = x.horizon();
    match phi.node() {
        Node::Prop(p) => x.value_at(t).unwrap().contains(p),
        Node::NegProp(p) => !x.value_at(t).unwrap().contains(p),
        Node::And(l, r) => holds(l, x, t) && holds(r, x, t),
        Node::Or(l, r) => holds(l, x, t) || holds(r, x, t),
        Node::Finally(bd, c) => {
            let (lo, hi) = (t + bd.lo(), t + bd.hi());
            if &hi >= horizon {
                return true;
            }
            let crit = critical_points(c, x);
            window_points(&lo, &hi, &crit, horizon).iter().any(|u| holds(c, x, u))
        }
        Node::Globally(bd, c) => {
            let (lo, hi) = (t + bd.lo(), t + bd.hi());
            if &lo >= horizon {
                return true;
            }
            let crit = critical_points(c, x);
            window_points(&lo, &hi, &crit, horizon).iter().all(|u| holds(c, x, u))
        }
        Node::Until(bd, l, r) => {
            let (lo, hi) = (t + bd.lo(), t + bd.hi());
            let crit_l = critical_points(l, x);
            let mut crit = crit_l.clone();
            crit.extend(critical_points(r, x));
            let left_until = |end: &Rational, inclusive: bool| {
                let mut pts = vec![t.clone()];
                pts.extend(crit_l.iter().filter(|b| *b > t && (if inclusive { *b <= end } else { *b < end })).cloned());
                pts.iter().all(|u| holds(l, x, u))
            };
            let strong = window_points(&lo, &hi, &crit, horizon)
                .iter()
                .any(|u| holds(r, x, u) && left_until(u, true));
            let weak = horizon <= &hi && left_until(horizon, false);
            strong || weak
        }
    }
}

/// Critical points of the root inside `[0, T)` plus midpoints between them.
pub fn probe_points(phi: &Formula, x: &SignalPrefix) -> Vec<Rational> {
    let t = x.horizon();
    let crit: Vec<Rational> = critical_points(phi, x).into_iter().collect();
    let mut out = Vec::new();
    for (i, c) in crit.iter().enumerate() {
        if c < t {
            out.push(c.clone());
        }
        if let Some(next) = crit.get(i + 1) {
            out.push((c + next) / int(2));
        }
    }
    out
}

pub fn g_sep_pointwise(phi: &Formula, s: &Sample) -> bool {
    let everywhere = |x: &SignalPrefix| probe_points(phi, x).iter().all(|t| holds(phi, x, t));
    s.positive().iter().all(&everywhere) && s.negative().iter().all(|y| !everywhere(y))
}

// ------------------------------------------------------ brute-force synthesis

/// Every time constant of the sample plus `k`.
pub fn sample_constants(s: &Sample, k: &Rational) -> Vec<Rational> {
    let mut v: Vec<Rational> = vec![s.horizon().clone(), k.clone()];
    for (_, x) in s.prefixes() {
        v.extend(x.breakpoints().cloned());
    }
    v
}

/// Grid `{0, g/3, 2g/3, ...} ∩ [0, k]` where `g` divides every constant.
pub fn bound_grid(s: &Sample, k: &Rational) -> Vec<Rational> {
    let consts = sample_constants(s, k);
    let g = rational_gcd(consts.iter()).unwrap_or_else(|| int(1)) / int(3);
    let mut out = Vec::new();
    let mut v = Rational::zero();
    while &v <= k {
        out.push(v.clone());
        v += &g;
    }
    out
}

fn bounds(grid: &[Rational]) -> Vec<TimeBound> {
    let mut out = Vec::new();
    for (i, a) in grid.iter().enumerate() {
        for b in &grid[i..] {
            out.push(TimeBound::new(a.clone(), b.clone()).unwrap());
        }
    }
    out
}

/// A candidate formula with its satisfaction set on every prefix of a sample
/// (positives first).
#[derive(Clone)]
struct Candidate {
    formula: Formula,
    sets: Vec<IntervalSet>,
    temporal: usize,
}

fn separates(c: &Candidate, positives: usize) -> bool {
    c.sets[..positives].iter().all(IntervalSet::is_full) && c.sets[positives..].iter().all(|s| !s.is_full())
}

/// Every formula of size `<= max_size` over the sample's propositions, built
/// bottom-up. Bounds come from `grid`; an operator whose operands already
/// contain a temporal operator draws its bounds from `coarse` instead.
fn enumerate(s: &Sample, max_size: usize, grid: &[Rational], coarse: &[Rational]) -> Vec<Vec<Candidate>> {
    let fine = bounds(grid);
    let rough = bounds(coarse);
    let prefixes: Vec<&SignalPrefix> = s.prefixes().map(|(_, x)| x).collect();
    let atoms: Vec<Candidate> = s
        .propositions()
        .iter()
        .map(|p| Candidate {
            formula: Formula::prop(p.clone()),
            sets: prefixes.iter().map(|x| x.base_intervals(p)).collect(),
            temporal: 0,
        })
        .collect();
    let mut by_size: Vec<Vec<Candidate>> = vec![Vec::new(), atoms];
    for size in 2..=max_size {
        let mut out = Vec::new();
        if size == 2 {
            for a in &by_size[1] {
                let sets = a.sets.iter().map(IntervalSet::complement).collect();
                if let Node::Prop(p) = a.formula.node() {
                    out.push(Candidate { formula: Formula::neg_prop(p.clone()), sets, temporal: 0 });
                }
            }
        }
        for c in &by_size[size - 1] {
            let bs = if c.temporal == 0 { &fine } else { &rough };
            for b in bs {
                let f = c.sets.iter().map(|x| monitor::finally_step(x, b.lo(), b.hi()).1).collect();
                out.push(Candidate { formula: Formula::finally(b.clone(), c.formula.clone()), sets: f, temporal: c.temporal + 1 });
                let g = c.sets.iter().map(|x| monitor::globally_step(x, b.lo(), b.hi()).1).collect();
                out.push(Candidate { formula: Formula::globally(b.clone(), c.formula.clone()), sets: g, temporal: c.temporal + 1 });
            }
        }
        // Binary nodes. Children may share subformulas, in which case the
        // DAG counts them once, so sizes need not add up.
        let mut pairs: Vec<(&Candidate, &Candidate)> = Vec::new();
        for ls in 1..size {
            for rs in 1..size {
                if ls + rs < size - 1 {
                    continue;
                }
                for l in &by_size[ls] {
                    if ls == size - 1 && rs == size - 1 {
                        pairs.push((l, l));
                        continue;
                    }
                    for r in &by_size[rs] {
                        pairs.push((l, r));
                    }
                }
            }
        }
        for (l, r) in pairs {
            let formula_and = Formula::and(l.formula.clone(), r.formula.clone());
            if formula_and.size() != size {
                continue;
            }
            let zip = |op: &dyn Fn(&IntervalSet, &IntervalSet) -> IntervalSet| {
                l.sets.iter().zip(&r.sets).map(|(a, b)| op(a, b)).collect::<Vec<_>>()
            };
            let temporal = l.temporal + r.temporal;
            out.push(Candidate { formula: formula_and, sets: zip(&|a, b| a.intersect(b).unwrap()), temporal });
            out.push(Candidate {
                formula: Formula::or(l.formula.clone(), r.formula.clone()),
                sets: zip(&|a, b| a.union(b).unwrap()),
                temporal,
            });
            let bs = if temporal == 0 { &fine } else { &rough };
            for b in bs {
                out.push(Candidate {
                    formula: Formula::until(b.clone(), l.formula.clone(), r.formula.clone()),
                    sets: zip(&|x, y| monitor::until_step(x, y, b.lo(), b.hi()).unwrap().result),
                    temporal: temporal + 1,
                });
            }
        }
        by_size.push(out);
    }
    by_size
}

/// Smallest size `<= 3` with a separating formula of lookahead at most `k`,
/// with one such formula. Bounds range over multiples of `g/3`, where `g`
/// divides every time constant of the sample and `k`; that grid realizes
/// every distinct behaviour of a single timed operator. Nested timed
/// operators use multiples of `g`.
pub fn brute_force_minimal(s: &Sample, k: &Rational) -> Option<(usize, Formula)> {
    let consts = sample_constants(s, k);
    let g = rational_gcd(consts.iter()).unwrap_or_else(|| int(1));
    let grid = bound_grid(s, k);
    let mut coarse = Vec::new();
    let mut v = Rational::zero();
    while &v <= k {
        coarse.push(v.clone());
        v += &g;
    }
    let positives = s.positive().len();
    for size in 1..=3 {
        let by_size = enumerate(s, size, &grid, &coarse);
        for c in &by_size[size] {
            if &c.formula.future_reach() <= k && separates(c, positives) {
                debug_assert!(monitor::is_g_sep(&c.formula, s).unwrap().is_separating());
                return Some((size, c.formula.clone()));
            }
        }
    }
    None
}

// ------------------------------------------------- dense-grid separability

/// Integer-scaled copy of a prefix: value at every multiple of `step`.
fn sampled(x: &SignalPrefix, step: &Rational) -> Vec<Valuation> {
    let n: usize = (x.horizon() / step).to_integer().try_into().unwrap();
    (0..n).map(|k| x.value_at(&(step * int(k as i64))).unwrap().clone()).collect()
}

/// Brute-force K-infix-separability on a dense grid. Window starts and ends
/// range over multiples of `g/8` (strictly below `T`), occurrence offsets
/// over multiples of `g/8`, and windows are compared at every multiple of
/// `g/16` plus the closed right end.
pub fn dense_grid_separable(s: &Sample, k: &Rational) -> bool {
    let consts = sample_constants(s, k);
    let g = rational_gcd(consts.iter()).unwrap_or_else(|| int(1));
    let step = &g / int(16);
    let t_ticks: i64 = (s.horizon() / &step).to_integer().try_into().unwrap();
    let k_ticks: i64 = (k / &step).to_integer().try_into().unwrap();
    let xs: Vec<Vec<Valuation>> = s.positive().iter().map(|x| sampled(x, &step)).collect();
    let occurs = |y: &[Valuation], t1: i64, len: i64| {
        xs.iter().any(|x| {
            (0..t_ticks - len).step_by(2).any(|tp| (0..=len).all(|d| x[(tp + d) as usize] == y[(t1 + d) as usize]))
        })
    };
    s.negative().iter().all(|yp| {
        let y = sampled(yp, &step);
        (0..t_ticks).step_by(2).any(|t1| {
            let max_len = k_ticks.min(t_ticks - 1 - t1);
            (0..=max_len).step_by(2).any(|len| !occurs(&y, t1, len))
        })
    })
}

/// Random sample with distinct positive and negative prefixes.
pub fn rand_sample(r: &mut StdRng, alphabet: &[&str], max_t: i64, per_label: usize, max_segments: usize, den: i64) -> Sample {
    loop {
        let t = int(r.gen_range(1..=max_t));
        let pos: Vec<SignalPrefix> =
            (0..r.gen_range(1..=per_label)).map(|_| rand_prefix(r, alphabet, &t, max_segments, den)).collect();
        let neg: Vec<SignalPrefix> =
            (0..r.gen_range(1..=per_label)).map(|_| rand_prefix(r, alphabet, &t, max_segments, den)).collect();
        let props: BTreeSet<String> = alphabet.iter().map(|s| s.to_string()).collect();
        if let Ok(s) = Sample::new(t, props, pos, neg) {
            return s;
        }
    }
}

/// Labels random prefixes by `target`: positive when it holds everywhere.
pub fn label_by(target: &Formula, prefixes: Vec<SignalPrefix>, alphabet: &[&str]) -> Option<Sample> {
    let t = prefixes.first()?.horizon().clone();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for x in prefixes {
        if monitor::intervals(target, &x).is_full() {
            if !pos.contains(&x) {
                pos.push(x);
            }
        } else if !neg.contains(&x) {
            neg.push(x);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    Sample::new(t, alphabet.iter().map(|s| s.to_string()).collect(), pos, neg).ok()
}

/// A satisfiable synthesis instance: a sample labeled by a random formula of
/// size at most `max_size`, with lookahead bound covering that formula.
pub fn sat_instance(r: &mut StdRng, alphabet: &[&str], max_size: usize, max_prefixes: usize, max_segments: usize) -> (Sample, Rational, Formula) {
    loop {
        let target = rand_formula(r, alphabet, max_size, 2, 2);
        if target.size() > max_size {
            continue;
        }
        let t = int(r.gen_range(2..=4));
        let count = r.gen_range(2..=max_prefixes);
        let prefixes = (0..count).map(|_| rand_prefix(r, alphabet, &t, max_segments, 2)).collect();
        if let Some(s) = label_by(&target, prefixes, alphabet) {
            let k = target.future_reach() + ratio(r.gen_range(0..=2), 2);
            return (s, k, target);
        }
    }
}

/// Encodes `s` at size `n`, solves, and checks everything a model promises:
/// the model satisfies the query, the decoded formula separates the sample
/// within the lookahead bound, and the root slots carry exactly the monitor's
/// intervals. Returns the decoded formula, or `None` when unsatisfiable.
pub fn check_encoding(
    s: &Sample,
    n: usize,
    k: &Rational,
    backend: &mut dyn mtl_synth::solver::Backend,
) -> Result<Option<Formula>, String> {
    use mtl_synth::encoder::{decode, encode, read_slots};
    use mtl_synth::solver::{validate, SatResult};
    let enc = encode(s, n, k).map_err(|e| e.to_string())?;
    let model = match backend.check_sat(&enc.formula, &enc.ctx, None).map_err(|e| e.to_string())? {
        SatResult::Sat(m) => m,
        SatResult::Unsat => return Ok(None),
        SatResult::Unknown(r) => return Err(format!("solver gave up: {r}")),
    };
    validate(&enc.formula, &enc.ctx, &model).map_err(|e| format!("model rejected: {e}"))?;
    let phi = decode(&model, &enc.layout).map_err(|e| e.to_string())?;
    if !monitor::is_g_sep(&phi, s).unwrap().is_separating() {
        return Err(format!("{phi} does not separate"));
    }
    if &phi.future_reach() > k {
        return Err(format!("{phi} looks ahead {} > {k}", phi.future_reach()));
    }
    if phi.size() > n {
        return Err(format!("{phi} has size {} > {n}", phi.size()));
    }
    for (index, (_, x)) in s.prefixes().enumerate() {
        let slots = read_slots(&model, &enc.layout, n, index).map_err(|e| e.to_string())?;
        let expected = monitor::intervals(&phi, x);
        if slots != expected.intervals() {
            return Err(format!("root slots {slots:?} differ from {expected} on prefix {index} for {phi}"));
        }
    }
    Ok(Some(phi))
}
