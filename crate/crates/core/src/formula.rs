//! MTL formulas in negation normal form, represented as shared syntax DAGs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("interval [{lo},{hi}] is invalid: bounds must satisfy 0 <= a <= b")]
    InvalidBound { lo: String, hi: String },
}

/// Closed, bounded time interval `[lo, hi]` carried by a temporal operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeBound {
    lo: Rational,
    hi: Rational,
}

impl TimeBound {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, FormulaError> {
        if lo.is_negative() || lo > hi {
            return Err(FormulaError::InvalidBound {
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        Ok(TimeBound { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Prop(String),
    NegProp(String),
    And(Formula, Formula),
    Or(Formula, Formula),
    Until(TimeBound, Formula, Formula),
    Finally(TimeBound, Formula),
    Globally(TimeBound, Formula),
}

/// An immutable MTL formula. Equality and hashing are structural; identical
/// subformulas may additionally share one allocation (see [`Interner`]).
#[derive(Clone, Eq)]
pub struct Formula(Arc<Node>);

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

impl Formula {
    pub fn from_node(node: Node) -> Self {
        Formula(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Self::from_node(Node::Prop(name.into()))
    }

    pub fn neg_prop(name: impl Into<String>) -> Self {
        Self::from_node(Node::NegProp(name.into()))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Self::from_node(Node::And(l, r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Self::from_node(Node::Or(l, r))
    }

    pub fn until(bound: TimeBound, l: Formula, r: Formula) -> Self {
        Self::from_node(Node::Until(bound, l, r))
    }

    pub fn finally(bound: TimeBound, f: Formula) -> Self {
        Self::from_node(Node::Finally(bound, f))
    }

    pub fn globally(bound: TimeBound, f: Formula) -> Self {
        Self::from_node(Node::Globally(bound, f))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self.node() {
            Node::Prop(_) | Node::NegProp(_) => vec![],
            Node::Finally(_, f) | Node::Globally(_, f) => vec![f],
            Node::And(l, r) | Node::Or(l, r) | Node::Until(_, l, r) => vec![l, r],
        }
    }

    /// Number of nodes in the syntax DAG, i.e. distinct structural subformulas.
    pub fn size(&self) -> usize {
        self.dag().len()
    }

    pub fn future_reach(&self) -> Rational {
        let dag = self.dag();
        let mut fr: Vec<Rational> = Vec::with_capacity(dag.len());
        for node in dag.nodes() {
            let child = |k: Option<usize>| k.map(|i| fr[i].clone()).unwrap_or_else(Rational::zero);
            let value = match &node.label {
                DagLabel::Prop(_) | DagLabel::NegProp(_) => Rational::zero(),
                DagLabel::And | DagLabel::Or => child(node.left).max(child(node.right)),
                DagLabel::Until(b) => b.hi().clone() + child(node.left).max(child(node.right)),
                DagLabel::Finally(b) | DagLabel::Globally(b) => b.hi().clone() + child(node.left),
            };
            fr.push(value);
        }
        fr.pop().unwrap_or_else(Rational::zero)
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        self.dag()
            .nodes()
            .iter()
            .filter_map(|n| match &n.label {
                DagLabel::Prop(p) | DagLabel::NegProp(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    /// Height of the parse tree; a proposition has height 0.
    pub fn height(&self) -> usize {
        self.children().iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Topologically ordered syntax DAG (children before parents, root last).
    pub fn dag(&self) -> Dag {
        let mut index: HashMap<Formula, usize> = HashMap::new();
        let mut nodes = Vec::new();
        Dag::visit(self, &mut index, &mut nodes);
        Dag { nodes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DagLabel {
    Prop(String),
    NegProp(String),
    And,
    Or,
    Until(TimeBound),
    Finally(TimeBound),
    Globally(TimeBound),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagNode {
    pub label: DagLabel,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub formula: Formula,
}

/// Flattened syntax DAG; every child index is smaller than its parent's.
#[derive(Debug, Clone)]
pub struct Dag {
    nodes: Vec<DagNode>,
}

impl Dag {
    fn visit(f: &Formula, index: &mut HashMap<Formula, usize>, nodes: &mut Vec<DagNode>) -> usize {
        if let Some(&i) = index.get(f) {
            return i;
        }
        let (label, left, right) = match f.node() {
            Node::Prop(p) => (DagLabel::Prop(p.clone()), None, None),
            // a negated proposition has the proposition itself as a subformula
            Node::NegProp(p) => (DagLabel::NegProp(p.clone()), Some(Self::visit(&Formula::prop(p.clone()), index, nodes)), None),
            Node::And(l, r) => {
                let (l, r) = (Self::visit(l, index, nodes), Self::visit(r, index, nodes));
                (DagLabel::And, Some(l), Some(r))
            }
            Node::Or(l, r) => {
                let (l, r) = (Self::visit(l, index, nodes), Self::visit(r, index, nodes));
                (DagLabel::Or, Some(l), Some(r))
            }
            Node::Until(b, l, r) => {
                let (l, r) = (Self::visit(l, index, nodes), Self::visit(r, index, nodes));
                (DagLabel::Until(b.clone()), Some(l), Some(r))
            }
            Node::Finally(b, c) => (DagLabel::Finally(b.clone()), Some(Self::visit(c, index, nodes)), None),
            Node::Globally(b, c) => (DagLabel::Globally(b.clone()), Some(Self::visit(c, index, nodes)), None),
        };
        nodes.push(DagNode { label, left, right, formula: f.clone() });
        let i = nodes.len() - 1;
        index.insert(f.clone(), i);
        i
    }

    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Hash-consing table: structurally identical nodes built through the same
/// interner share one allocation.
#[derive(Debug, Default)]
pub struct Interner {
    table: HashMap<Node, Formula>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, node: Node) -> Formula {
        if let Some(f) = self.table.get(&node) {
            return f.clone();
        }
        let f = Formula::from_node(node.clone());
        self.table.insert(node, f.clone());
        f
    }

    /// Rebuilds `f` bottom-up through the table.
    pub fn share(&mut self, f: &Formula) -> Formula {
        let node = match f.node() {
            Node::Prop(_) | Node::NegProp(_) => f.node().clone(),
            Node::And(l, r) => Node::And(self.share(l), self.share(r)),
            Node::Or(l, r) => Node::Or(self.share(l), self.share(r)),
            Node::Until(b, l, r) => Node::Until(b.clone(), self.share(l), self.share(r)),
            Node::Finally(b, c) => Node::Finally(b.clone(), self.share(c)),
            Node::Globally(b, c) => Node::Globally(b.clone(), self.share(c)),
        };
        self.intern(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn b(lo: i64, hi: i64) -> TimeBound {
        TimeBound::new(int(lo), int(hi)).unwrap()
    }

    #[test]
    fn size_counts_distinct_subformulas() {
        let p = Formula::prop("p");
        assert_eq!(p.size(), 1);
        assert_eq!(Formula::or(p.clone(), p.clone()).size(), 2);
        let q = Formula::prop("q");
        let shared = Formula::or(
            Formula::and(p.clone(), Formula::globally(b(1, 2), q)),
            Formula::finally(b(0, 1), p.clone()),
        );
        assert_eq!(shared.size(), 6);
        // separately allocated but structurally equal leaves still count once
        let shared2 = Formula::or(
            Formula::and(Formula::prop("p"), Formula::globally(b(1, 2), Formula::prop("q"))),
            Formula::finally(b(0, 1), Formula::prop("p")),
        );
        assert_eq!(shared2.size(), 6);
        assert_eq!(shared, shared2);
        assert_eq!(Formula::neg_prop("p").size(), 2);
        assert_eq!(Formula::and(Formula::neg_prop("p"), Formula::prop("p")).size(), 3);
    }

    #[test]
    fn future_reach_follows_definition() {
        let p = Formula::prop("p");
        assert_eq!(p.future_reach(), int(0));
        assert_eq!(Formula::neg_prop("p").future_reach(), int(0));
        assert_eq!(Formula::finally(b(0, 2), p.clone()).future_reach(), int(2));
        let u = Formula::until(b(1, 3), p.clone(), Formula::finally(b(0, 2), Formula::prop("q")));
        assert_eq!(u.future_reach(), int(5));
        let g = Formula::globally(b(0, 1), Formula::or(p.clone(), Formula::finally(b(1, 4), p)));
        assert_eq!(g.future_reach(), int(5));
    }

    #[test]
    fn dag_is_topological() {
        let p = Formula::prop("p");
        let f = Formula::until(b(0, 1), Formula::finally(b(0, 1), p.clone()), p);
        let dag = f.dag();
        for (i, n) in dag.nodes().iter().enumerate() {
            for c in [n.left, n.right].into_iter().flatten() {
                assert!(c < i);
            }
        }
        assert_eq!(dag.nodes().last().unwrap().formula, f);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(TimeBound::new(int(2), int(1)).is_err());
        assert!(TimeBound::new(int(-1), int(1)).is_err());
        assert!(TimeBound::new(int(1), int(1)).is_ok());
    }

    #[test]
    fn interner_shares_allocations() {
        let mut i = Interner::new();
        let a = i.intern(Node::Prop("p".into()));
        let b2 = i.intern(Node::Prop("p".into()));
        assert!(Arc::ptr_eq(&a.0, &b2.0));
    }
}
