//! Reduction of bounded-size formula synthesis to an LRA query.
//!
//! Nodes are numbered `1..=n` with children strictly below their parents and
//! node `n` as the root. For every node and prefix the query carries the
//! node's satisfaction set as an array of interval slots `[tl, tr)` plus a
//! count `num`; slots past `num` are padded with `[T, T)`.

use std::collections::HashMap;

use num::Zero;
use thiserror::Error;

use crate::formula::{Formula, FormulaError, Interner, Node, TimeBound};
use crate::interval::Interval;
use crate::lra::{Context, LraError, LraFormula as F, Model, Term};
use crate::rational::{int, Rational};
use crate::signal::{Label, Sample};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("formula size must be at least 1")]
    ZeroSize,
    #[error("lookahead bound must be non-negative")]
    NegativeBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("node {node} carries {count} labels")]
    Label { node: usize, count: usize },
    #[error("node {node} has {count} {side} children")]
    Children { node: usize, side: &'static str, count: usize },
    #[error("node {node}: {source}")]
    Bound {
        node: usize,
        #[source]
        source: FormulaError,
    },
    #[error("node {node}: slot count {value} is not an integer in range")]
    SlotCount { node: usize, value: String },
    #[error(transparent)]
    Model(#[from] LraError),
}

/// Operator carried by a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    /// Index into the sorted alphabet.
    Prop(usize),
    Not,
    Or,
    And,
    Until,
    Finally,
    Globally,
}

impl NodeLabel {
    fn suffix(self) -> String {
        match self {
            NodeLabel::Prop(k) => format!("p{k}"),
            NodeLabel::Not => "not".into(),
            NodeLabel::Or => "or".into(),
            NodeLabel::And => "and".into(),
            NodeLabel::Until => "until".into(),
            NodeLabel::Finally => "fin".into(),
            NodeLabel::Globally => "glob".into(),
        }
    }

    fn is_unary(self) -> bool {
        matches!(self, NodeLabel::Not | NodeLabel::Finally | NodeLabel::Globally)
    }

    fn is_binary(self) -> bool {
        matches!(self, NodeLabel::Or | NodeLabel::And | NodeLabel::Until)
    }

    fn is_temporal(self) -> bool {
        matches!(self, NodeLabel::Until | NodeLabel::Finally | NodeLabel::Globally)
    }
}

/// Variable naming and per-prefix slot capacities for one query.
#[derive(Debug, Clone)]
pub struct Layout {
    pub n: usize,
    pub alphabet: Vec<String>,
    pub horizon: Rational,
    /// Slot capacity per prefix, positives first.
    pub caps: Vec<usize>,
    /// Largest per-proposition interval count per prefix.
    pub mus: Vec<usize>,
}

impl Layout {
    pub fn new(sample: &Sample, n: usize) -> Result<Self, EncodeError> {
        if n == 0 {
            return Err(EncodeError::ZeroSize);
        }
        Ok(Layout {
            n,
            alphabet: sample.propositions().iter().cloned().collect(),
            horizon: sample.horizon().clone(),
            caps: interval_slot_bound(sample, n),
            mus: sample.prefixes().map(|(_, x)| max_base_count(sample, x)).collect(),
        })
    }

    /// Slot capacity for node `i` on prefix `s`. The subformula rooted at
    /// node `i` has at most `i` nodes, so it needs no more than the bound
    /// computed for size `i`.
    pub fn node_cap(&self, i: usize, s: usize) -> usize {
        (self.mus[s].max(1) * i + 2).min(self.caps[s])
    }

    pub fn labels(&self) -> Vec<NodeLabel> {
        let mut out: Vec<NodeLabel> = (0..self.alphabet.len()).map(NodeLabel::Prop).collect();
        out.extend([
            NodeLabel::Not,
            NodeLabel::Or,
            NodeLabel::And,
            NodeLabel::Until,
            NodeLabel::Finally,
            NodeLabel::Globally,
        ]);
        out
    }

    pub fn label_var(&self, i: usize, label: NodeLabel) -> String {
        format!("x_{i}_{}", label.suffix())
    }

    pub fn left_var(&self, i: usize, j: usize) -> String {
        format!("l_{i}_{j}")
    }

    pub fn right_var(&self, i: usize, j: usize) -> String {
        format!("r_{i}_{j}")
    }

    pub fn lo_var(&self, i: usize) -> String {
        format!("a_{i}")
    }

    pub fn hi_var(&self, i: usize) -> String {
        format!("b_{i}")
    }

    pub fn reach_var(&self, i: usize) -> String {
        format!("f_{i}")
    }

    pub fn tl_var(&self, i: usize, m: usize, s: usize) -> String {
        format!("tl_{i}_{m}_{s}")
    }

    pub fn tr_var(&self, i: usize, m: usize, s: usize) -> String {
        format!("tr_{i}_{m}_{s}")
    }

    pub fn num_var(&self, i: usize, s: usize) -> String {
        format!("num_{i}_{s}")
    }
}

/// Per-prefix slot capacity `max(μ, 1)·n + 2`, where `μ` is the largest
/// number of maximal intervals of any single proposition on that prefix.
pub fn interval_slot_bound(sample: &Sample, n: usize) -> Vec<usize> {
    sample
        .prefixes()
        .map(|(_, x)| max_base_count(sample, x).max(1) * n + 2)
        .collect()
}

fn max_base_count(sample: &Sample, x: &crate::signal::SignalPrefix) -> usize {
    sample.propositions().iter().map(|p| x.base_intervals(p).len()).max().unwrap_or(0)
}

/// An interval array `[l_m, r_m)`, `m = 1..=cap`, with an active count.
#[derive(Debug, Clone)]
struct Slots {
    l: Vec<Term>,
    r: Vec<Term>,
    num: Term,
    horizon: Rational,
}

impl Slots {
    fn named(ctx: &mut Context, cap: usize, horizon: &Rational, name: impl Fn(&str, usize) -> String) -> Self {
        Slots {
            l: (1..=cap).map(|m| ctx.real(name("l", m))).collect(),
            r: (1..=cap).map(|m| ctx.real(name("r", m))).collect(),
            num: ctx.real(name("num", 0)),
            horizon: horizon.clone(),
        }
    }

    fn cap(&self) -> usize {
        self.l.len()
    }

    fn active(&self, m: usize) -> F {
        F::ge(self.num.clone(), Term::constant(int(m as i64)))
    }

    /// Left bound of slot `m` (1-based); slots past the capacity read as `T`.
    fn left(&self, m: usize) -> Term {
        self.l.get(m - 1).cloned().unwrap_or_else(|| Term::constant(self.horizon.clone()))
    }

    fn right(&self, m: usize) -> Term {
        self.r.get(m - 1).cloned().unwrap_or_else(|| Term::constant(self.horizon.clone()))
    }

    fn t(&self) -> Term {
        Term::constant(self.horizon.clone())
    }

    /// Sorted, disjoint, non-adjacent active slots followed by `[T,T)` padding.
    fn well_formed(&self) -> F {
        let t = self.t();
        let zero = Term::zero();
        let mut parts = vec![F::or((0..=self.cap()).map(|k| F::eq(self.num.clone(), Term::constant(int(k as i64)))))];
        for m in 1..=self.cap() {
            let (l, r) = (self.left(m), self.right(m));
            parts.push(F::ite(
                self.active(m),
                F::and([F::le(zero.clone(), l.clone()), F::lt(l.clone(), r.clone()), F::le(r.clone(), t.clone())]),
                F::and([F::eq(l, t.clone()), F::eq(r, t.clone())]),
            ));
            if m < self.cap() {
                parts.push(F::implies(self.active(m + 1), F::lt(self.right(m), self.left(m + 1))));
            }
        }
        F::and(parts)
    }

    fn equals(&self, other: &Slots) -> F {
        let mut parts = vec![F::eq(self.num.clone(), other.num.clone())];
        for m in 1..=self.cap().max(other.cap()) {
            parts.push(F::eq(self.left(m), other.left(m)));
            parts.push(F::eq(self.right(m), other.right(m)));
        }
        F::and(parts)
    }

    fn constant(&self, intervals: &[Interval]) -> F {
        if intervals.len() > self.cap() {
            return F::False;
        }
        let mut parts = vec![F::eq(self.num.clone(), Term::constant(int(intervals.len() as i64)))];
        for (k, iv) in intervals.iter().enumerate() {
            parts.push(F::eq(self.left(k + 1), Term::constant(iv.lo.clone())));
            parts.push(F::eq(self.right(k + 1), Term::constant(iv.hi.clone())));
        }
        F::and(parts)
    }
}

/// One member of an unnormalized interval list.
#[derive(Debug, Clone)]
struct Entry {
    guard: F,
    l: Term,
    r: Term,
}

fn slot_entries(s: &Slots) -> Vec<Entry> {
    (1..=s.cap()).map(|m| Entry { guard: s.active(m), l: s.left(m), r: s.right(m) }).collect()
}

/// `out` holds exactly the maximal intervals whose left bounds are the
/// qualifying `lefts` and whose right bounds are the qualifying `rights`.
/// Relies on `out` being well formed.
fn bounds_set(ctx: &mut Context, out: &Slots, lefts: Vec<(F, Term)>, rights: Vec<(F, Term)>) -> F {
    let mut parts = Vec::new();
    for (side, cands) in [(0, lefts), (1, rights)] {
        let slot = |m: usize| if side == 0 { out.left(m) } else { out.right(m) };
        let mut qs = Vec::with_capacity(cands.len());
        for (cond, term) in cands {
            let q = ctx.fresh_bool("q");
            parts.push(F::iff(q.clone(), cond));
            parts.push(F::implies(
                q.clone(),
                F::or((1..=out.cap()).map(|m| F::and([out.active(m), F::eq(slot(m), term.clone())]))),
            ));
            qs.push((q, term));
        }
        for m in 1..=out.cap() {
            parts.push(F::implies(
                out.active(m),
                F::or(qs.iter().map(|(q, term)| F::and([q.clone(), F::eq(slot(m), term.clone())]))),
            ));
        }
    }
    F::and(parts)
}

/// Maximal intervals of the union of `bag`.
fn normalize_union(ctx: &mut Context, bag: &[Entry], out: &Slots) -> F {
    let mut lefts = Vec::with_capacity(bag.len());
    let mut rights = Vec::with_capacity(bag.len());
    for (x, ex) in bag.iter().enumerate() {
        let own = F::and([ex.guard.clone(), F::lt(ex.l.clone(), ex.r.clone())]);
        let mut lcond = vec![own.clone()];
        let mut rcond = vec![own];
        for (y, ey) in bag.iter().enumerate() {
            if x == y {
                continue;
            }
            // another member covers or touches this bound from the outside
            lcond.push(F::not(F::and([
                ey.guard.clone(),
                F::lt(ey.l.clone(), ex.l.clone()),
                F::le(ex.l.clone(), ey.r.clone()),
            ])));
            rcond.push(F::not(F::and([
                ey.guard.clone(),
                F::le(ey.l.clone(), ex.r.clone()),
                F::lt(ex.r.clone(), ey.r.clone()),
            ])));
        }
        lefts.push((F::and(lcond), ex.l.clone()));
        rights.push((F::and(rcond), ex.r.clone()));
    }
    bounds_set(ctx, out, lefts, rights)
}

fn intersect(ctx: &mut Context, a: &Slots, b: &Slots, out: &Slots) -> F {
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for (p, q) in [(a, b), (b, a)] {
        for m in 1..=p.cap() {
            let (l, r) = (p.left(m), p.right(m));
            let l_in = F::or((1..=q.cap()).map(|k| {
                F::and([q.active(k), F::le(q.left(k), l.clone()), F::lt(l.clone(), q.right(k))])
            }));
            let r_in = F::or((1..=q.cap()).map(|k| {
                F::and([q.active(k), F::lt(q.left(k), r.clone()), F::le(r.clone(), q.right(k))])
            }));
            lefts.push((F::and([p.active(m), l_in]), l));
            rights.push((F::and([p.active(m), r_in]), r));
        }
    }
    bounds_set(ctx, out, lefts, rights)
}

/// `out` is the complement of `inp` within `[0, T)`; fails if `out` is too small.
fn complement(inp: &Slots, out: &Slots) -> F {
    let t = inp.t();
    let zero_start = F::and([inp.active(1), F::eq(inp.left(1), Term::zero())]);
    let mut starts_at_zero = Vec::new();
    for k in 1..=out.cap() {
        starts_at_zero.push(F::eq(out.left(k), inp.right(k)));
        starts_at_zero.push(F::eq(out.right(k), inp.left(k + 1)));
    }
    for k in out.cap() + 1..=inp.cap() {
        starts_at_zero.push(F::eq(inp.right(k), t.clone()));
    }
    let mut starts_later = vec![F::eq(out.left(1), Term::zero()), F::eq(out.right(1), inp.left(1))];
    for k in 2..=out.cap() {
        starts_later.push(F::eq(out.left(k), inp.right(k - 1)));
        starts_later.push(F::eq(out.right(k), inp.left(k)));
    }
    for k in out.cap().max(1)..=inp.cap() {
        starts_later.push(F::eq(inp.right(k), t.clone()));
    }
    F::ite(zero_start, F::and(starts_at_zero), F::and(starts_later))
}

/// Each active slot shifted back by `[a, b]`: `[max(0, l - b), r - a)`.
fn shift_back(ctx: &mut Context, s: &Slots, a: &Term, b: &Term) -> (Vec<Entry>, F) {
    let mut defs = Vec::new();
    let mut bag = Vec::new();
    for m in 1..=s.cap() {
        let (lo, def) = ctx.mk_max(&Term::zero(), &(&s.left(m) - b));
        defs.push(def);
        bag.push(Entry { guard: s.active(m), l: lo, r: &s.right(m) - a });
    }
    (bag, F::and(defs))
}

/// The query for one size together with its variable layout.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub layout: Layout,
    pub ctx: Context,
    pub formula: F,
    pub structural_atoms: usize,
    pub reach_atoms: usize,
    pub semantic_atoms: usize,
}

pub fn encode(sample: &Sample, n: usize, k: &Rational) -> Result<Encoding, EncodeError> {
    if k < &Rational::zero() {
        return Err(EncodeError::NegativeBound);
    }
    let layout = Layout::new(sample, n)?;
    let mut ctx = Context::new();
    let structural = build_structural(&mut ctx, &layout);
    let reach = build_future_reach(&mut ctx, &layout, k);
    let semantic = build_semantic(&mut ctx, &layout, sample);
    let (structural_atoms, reach_atoms, semantic_atoms) =
        (structural.atom_count(), reach.atom_count(), semantic.atom_count());
    let formula = F::and([structural, reach, semantic]);
    Ok(Encoding { layout, ctx, formula, structural_atoms, reach_atoms, semantic_atoms })
}

fn exactly_one(items: Vec<F>) -> F {
    let mut parts = vec![F::or(items.clone())];
    for x in 0..items.len() {
        for y in x + 1..items.len() {
            parts.push(F::not(F::and([items[x].clone(), items[y].clone()])));
        }
    }
    F::and(parts)
}

/// Well-formedness of the syntax DAG: one operator per node, correct arity,
/// negation only over propositions, and ordered temporal bounds.
pub fn build_structural(ctx: &mut Context, layout: &Layout) -> F {
    let mut parts = Vec::new();
    let labels = layout.labels();
    for i in 1..=layout.n {
        let x: Vec<F> = labels.iter().map(|&lab| ctx.boolean(layout.label_var(i, lab))).collect();
        let lefts: Vec<F> = (1..i).map(|j| ctx.boolean(layout.left_var(i, j))).collect();
        let rights: Vec<F> = (1..i).map(|j| ctx.boolean(layout.right_var(i, j))).collect();
        parts.push(exactly_one(x.clone()));
        for (lab, xv) in labels.iter().zip(&x) {
            let arity = if lab.is_binary() {
                F::and([exactly_one(lefts.clone()), exactly_one(rights.clone())])
            } else if lab.is_unary() {
                F::and([exactly_one(lefts.clone()), F::and(rights.iter().map(|r| F::not(r.clone())))])
            } else {
                F::and(lefts.iter().chain(&rights).map(|c| F::not(c.clone())))
            };
            parts.push(F::implies(xv.clone(), arity));
        }
        let not_var = ctx.boolean(layout.label_var(i, NodeLabel::Not));
        for j in 1..i {
            let child_is_prop = F::or((0..layout.alphabet.len()).map(|p| F::bool_var(layout.label_var(j, NodeLabel::Prop(p)))));
            parts.push(F::implies(F::and([not_var.clone(), F::bool_var(layout.left_var(i, j))]), child_is_prop));
        }
        let a = ctx.real(layout.lo_var(i));
        let b = ctx.real(layout.hi_var(i));
        let temporal = F::or(labels.iter().filter(|l| l.is_temporal()).map(|&l| F::bool_var(layout.label_var(i, l))));
        parts.push(F::implies(temporal, F::and([F::le(Term::zero(), a.clone()), F::le(a, b)])));
    }
    F::and(parts)
}

/// Defines `f_i` as the lookahead of node `i` and bounds the root's by `K`.
/// Bounds of temporal nodes are also capped by `K`.
pub fn build_future_reach(ctx: &mut Context, layout: &Layout, k: &Rational) -> F {
    let mut parts = Vec::new();
    let kt = Term::constant(k.clone());
    for i in 1..=layout.n {
        let f = ctx.real(layout.reach_var(i));
        let b = ctx.real(layout.hi_var(i));
        let x = |lab| F::bool_var(layout.label_var(i, lab));
        let props = F::or((0..layout.alphabet.len()).map(|p| x(NodeLabel::Prop(p))));
        parts.push(F::implies(props, F::eq(f.clone(), Term::zero())));
        let temporal = F::or([x(NodeLabel::Until), x(NodeLabel::Finally), x(NodeLabel::Globally)]);
        parts.push(F::implies(temporal, F::le(b.clone(), kt.clone())));
        for j in 1..i {
            let fj = Term::var(layout.reach_var(j));
            let lj = F::bool_var(layout.left_var(i, j));
            parts.push(F::implies(F::and([x(NodeLabel::Not), lj.clone()]), F::eq(f.clone(), fj.clone())));
            let unary_temporal = F::or([x(NodeLabel::Finally), x(NodeLabel::Globally)]);
            parts.push(F::implies(F::and([unary_temporal, lj.clone()]), F::eq(f.clone(), &fj + &b)));
            for j2 in 1..i {
                let rj = F::bool_var(layout.right_var(i, j2));
                let (m, def) = ctx.mk_max(&fj, &Term::var(layout.reach_var(j2)));
                let both = F::and([lj.clone(), rj]);
                parts.push(F::implies(
                    F::and([F::or([x(NodeLabel::And), x(NodeLabel::Or)]), both.clone()]),
                    F::and([def.clone(), F::eq(f.clone(), m.clone())]),
                ));
                parts.push(F::implies(
                    F::and([x(NodeLabel::Until), both]),
                    F::and([def, F::eq(f.clone(), &m + &b)]),
                ));
            }
        }
    }
    parts.push(F::le(Term::var(layout.reach_var(layout.n)), kt));
    F::and(parts)
}

/// Ties every node's interval slots to its satisfaction set on every prefix
/// and requires the root to separate the sample.
pub fn build_semantic(ctx: &mut Context, layout: &Layout, sample: &Sample) -> F {
    let mut parts = Vec::new();
    let t = layout.horizon.clone();
    for (s, (label, x)) in sample.prefixes().enumerate() {
        let nodes: Vec<Slots> = (1..=layout.n)
            .map(|i| {
                Slots::named(ctx, layout.node_cap(i, s), &t, |kind, m| match kind {
                    "l" => layout.tl_var(i, m, s),
                    "r" => layout.tr_var(i, m, s),
                    _ => layout.num_var(i, s),
                })
            })
            .collect();
        for slots in &nodes {
            parts.push(slots.well_formed());
        }
        let base: Vec<Vec<Interval>> = layout.alphabet.iter().map(|p| x.base_intervals(p).intervals().to_vec()).collect();
        for i in 1..=layout.n {
            let out = &nodes[i - 1];
            let xv = |lab| F::bool_var(layout.label_var(i, lab));
            for (p, ivs) in base.iter().enumerate() {
                parts.push(F::implies(xv(NodeLabel::Prop(p)), out.constant(ivs)));
            }
            if i == 1 {
                continue;
            }
            let aux = |tag: &'static str, c: usize, ctx: &mut Context| {
                Slots::named(ctx, c, &t, |kind, m| match kind {
                    "num" => format!("{tag}num_{i}_{s}"),
                    _ => format!("{tag}{kind}_{i}_{m}_{s}"),
                })
            };
            let cap = layout.node_cap(i, s);
            let child_cap = layout.node_cap(i - 1, s);
            let cl = aux("cl", child_cap, ctx);
            let cr = aux("cr", child_cap, ctx);
            for j in 1..i {
                parts.push(F::implies(F::bool_var(layout.left_var(i, j)), cl.equals(&nodes[j - 1])));
                parts.push(F::implies(F::bool_var(layout.right_var(i, j)), cr.equals(&nodes[j - 1])));
            }
            let a = Term::var(layout.lo_var(i));
            let b = Term::var(layout.hi_var(i));

            parts.push(F::implies(xv(NodeLabel::Not), complement(&cl, out)));

            let bag: Vec<Entry> = slot_entries(&cl).into_iter().chain(slot_entries(&cr)).collect();
            let c = normalize_union(ctx, &bag, out);
            parts.push(F::implies(xv(NodeLabel::Or), c));

            let c = intersect(ctx, &cl, &cr, out);
            parts.push(F::implies(xv(NodeLabel::And), c));

            // F: shifted operand plus the weak tail [max(0, T - b), T)
            let (mut bag, defs) = shift_back(ctx, &cl, &a, &b);
            let (tail_lo, tail_def) = ctx.mk_max(&Term::zero(), &(&Term::constant(t.clone()) - &b));
            bag.push(Entry { guard: F::True, l: tail_lo, r: Term::constant(t.clone()) });
            let c = normalize_union(ctx, &bag, out);
            parts.push(F::implies(xv(NodeLabel::Finally), F::and([defs, tail_def, c])));

            // G: complement, shift, merge, complement
            let gc = aux("gc", cap, ctx);
            let gu = aux("gu", cap, ctx);
            let (bag, defs) = shift_back(ctx, &gc, &a, &b);
            let c = normalize_union(ctx, &bag, &gu);
            parts.push(F::implies(
                xv(NodeLabel::Globally),
                F::and([gc.well_formed(), complement(&cl, &gc), defs, gu.well_formed(), c, complement(&gu, out)]),
            ));

            let overlap = aux("ui", cap, ctx);
            let c = until(ctx, &cl, &cr, out, &a, &b, overlap);
            parts.push(F::implies(xv(NodeLabel::Until), c));
        }
        let root = &nodes[layout.n - 1];
        let full = F::and([
            root.active(1),
            F::eq(root.left(1), Term::zero()),
            F::eq(root.right(1), Term::constant(t.clone())),
        ]);
        parts.push(match label {
            Label::Positive => full,
            Label::Negative => F::not(full),
        });
    }
    F::and(parts)
}

fn until(ctx: &mut Context, cl: &Slots, cr: &Slots, out: &Slots, a: &Term, b: &Term, overlap: Slots) -> F {
    let t = cl.t();
    let mut parts = vec![overlap.well_formed()];
    parts.push(intersect(ctx, cl, cr, &overlap));
    let mut bag = Vec::new();
    for m in 1..=overlap.cap() {
        // cut the shifted overlap down to the left-operand interval hosting it
        let lo = ctx.fresh_real("ul");
        let shifted_lo = &overlap.left(m) - b;
        for host in 1..=cl.cap() {
            let hosts = F::and([
                overlap.active(m),
                cl.active(host),
                F::le(cl.left(host), overlap.left(m)),
                F::le(overlap.right(m), cl.right(host)),
            ]);
            let max = F::and([
                F::ge(lo.clone(), shifted_lo.clone()),
                F::ge(lo.clone(), cl.left(host)),
                F::or([F::eq(lo.clone(), shifted_lo.clone()), F::eq(lo.clone(), cl.left(host))]),
            ]);
            parts.push(F::implies(hosts, max));
        }
        bag.push(Entry { guard: overlap.active(m), l: lo, r: &overlap.right(m) - a });
    }
    // weak tail when the left operand holds up to the horizon
    let tail_lo = ctx.fresh_real("ut");
    let mut reaches_end = Vec::new();
    for host in 1..=cl.cap() {
        let ends = F::and([cl.active(host), F::eq(cl.right(host), t.clone())]);
        reaches_end.push(ends.clone());
        let start = &t - b;
        parts.push(F::implies(
            ends,
            F::and([
                F::ge(tail_lo.clone(), start.clone()),
                F::ge(tail_lo.clone(), cl.left(host)),
                F::or([F::eq(tail_lo.clone(), start), F::eq(tail_lo.clone(), cl.left(host))]),
            ]),
        ));
    }
    bag.push(Entry { guard: F::or(reaches_end), l: tail_lo, r: t });
    parts.push(normalize_union(ctx, &bag, out));
    F::and(parts)
}

/// Reads the formula rooted at node `n` off a model.
pub fn decode(model: &Model, layout: &Layout) -> Result<Formula, DecodeError> {
    let mut interner = Interner::new();
    let mut memo: HashMap<usize, Formula> = HashMap::new();
    decode_node(model, layout, layout.n, &mut interner, &mut memo)
}

fn one_child(model: &Model, layout: &Layout, i: usize, left: bool) -> Result<usize, DecodeError> {
    let mut found = Vec::new();
    for j in 1..i {
        let name = if left { layout.left_var(i, j) } else { layout.right_var(i, j) };
        if model.boolean(&name)? {
            found.push(j);
        }
    }
    match found.as_slice() {
        [j] => Ok(*j),
        _ => Err(DecodeError::Children { node: i, side: if left { "left" } else { "right" }, count: found.len() }),
    }
}

fn decode_node(
    model: &Model,
    layout: &Layout,
    i: usize,
    interner: &mut Interner,
    memo: &mut HashMap<usize, Formula>,
) -> Result<Formula, DecodeError> {
    if let Some(f) = memo.get(&i) {
        return Ok(f.clone());
    }
    let mut chosen = Vec::new();
    for lab in layout.labels() {
        if model.boolean(&layout.label_var(i, lab))? {
            chosen.push(lab);
        }
    }
    let [label] = chosen.as_slice() else {
        return Err(DecodeError::Label { node: i, count: chosen.len() });
    };
    let bound = || -> Result<TimeBound, DecodeError> {
        let a = model.real(&layout.lo_var(i))?;
        let b = model.real(&layout.hi_var(i))?;
        TimeBound::new(a, b).map_err(|source| DecodeError::Bound { node: i, source })
    };
    let node = match *label {
        NodeLabel::Prop(p) => Node::Prop(layout.alphabet[p].clone()),
        NodeLabel::Not => {
            let c = decode_node(model, layout, one_child(model, layout, i, true)?, interner, memo)?;
            match c.node() {
                Node::Prop(p) => Node::NegProp(p.clone()),
                _ => return Err(DecodeError::Label { node: i, count: 1 }),
            }
        }
        lab if lab.is_unary() => {
            let bd = bound()?;
            let c = decode_node(model, layout, one_child(model, layout, i, true)?, interner, memo)?;
            if lab == NodeLabel::Finally {
                Node::Finally(bd, c)
            } else {
                Node::Globally(bd, c)
            }
        }
        lab => {
            let l = decode_node(model, layout, one_child(model, layout, i, true)?, interner, memo)?;
            let r = decode_node(model, layout, one_child(model, layout, i, false)?, interner, memo)?;
            match lab {
                NodeLabel::And => Node::And(l, r),
                NodeLabel::Or => Node::Or(l, r),
                _ => Node::Until(bound()?, l, r),
            }
        }
    };
    let f = interner.intern(node);
    memo.insert(i, f.clone());
    Ok(f)
}

/// Active interval slots of node `i` on prefix `s`, in slot order.
pub fn read_slots(model: &Model, layout: &Layout, i: usize, s: usize) -> Result<Vec<Interval>, DecodeError> {
    let num = model.real(&layout.num_var(i, s))?;
    let cap = layout.caps[s];
    let count = (num.is_integer() && num >= Rational::zero() && num <= int(cap as i64))
        .then(|| num.to_integer().to_string().parse::<usize>().ok())
        .flatten()
        .ok_or_else(|| DecodeError::SlotCount { node: i, value: crate::rational::format_rational(&num) })?;
    (1..=count)
        .map(|m| Ok(Interval::new(model.real(&layout.tl_var(i, m, s))?, model.real(&layout.tr_var(i, m, s))?)))
        .collect()
}
