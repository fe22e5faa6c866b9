mod support;

use mtl_synth::encoder::{encode, interval_slot_bound, Layout, NodeLabel};
use mtl_synth::formula::{DagLabel, Formula};
use mtl_synth::lra::{LraFormula as F, Term};
use mtl_synth::parse;
use mtl_synth::rational::{int, Rational};
use mtl_synth::signal::Sample;
use mtl_synth::solver::{Backend, ExternalSolver, SatResult};
use support::*;

/// Constraints forcing the encoding's DAG to be exactly `phi`.
fn pin(layout: &Layout, phi: &Formula) -> F {
    let dag = phi.dag();
    assert_eq!(dag.len(), layout.n);
    let mut parts = Vec::new();
    for (k, node) in dag.nodes().iter().enumerate() {
        let i = k + 1;
        let (label, bound) = match &node.label {
            DagLabel::Prop(p) => (NodeLabel::Prop(layout.alphabet.iter().position(|a| a == p).unwrap()), None),
            DagLabel::NegProp(_) => (NodeLabel::Not, None),
            DagLabel::And => (NodeLabel::And, None),
            DagLabel::Or => (NodeLabel::Or, None),
            DagLabel::Until(b) => (NodeLabel::Until, Some(b)),
            DagLabel::Finally(b) => (NodeLabel::Finally, Some(b)),
            DagLabel::Globally(b) => (NodeLabel::Globally, Some(b)),
        };
        parts.push(F::bool_var(layout.label_var(i, label)));
        if let Some(l) = node.left {
            parts.push(F::bool_var(layout.left_var(i, l + 1)));
        }
        if let Some(r) = node.right {
            parts.push(F::bool_var(layout.right_var(i, r + 1)));
        }
        if let Some(b) = bound {
            parts.push(F::eq(Term::var(layout.lo_var(i)), Term::constant(b.lo().clone())));
            parts.push(F::eq(Term::var(layout.hi_var(i)), Term::constant(b.hi().clone())));
        }
    }
    F::and(parts)
}

/// Whether the encoding at `phi`'s size admits `phi` itself.
fn admits(s: &Sample, k: &Rational, phi: &Formula, solver: &mut ExternalSolver) -> bool {
    let enc = encode(s, phi.size(), k).unwrap();
    let query = F::and([enc.formula.clone(), pin(&enc.layout, phi)]);
    match solver.check_sat(&query, &enc.ctx, None).unwrap() {
        SatResult::Sat(_) => true,
        SatResult::Unsat => false,
        SatResult::Unknown(why) => panic!("solver gave up: {why}"),
    }
}

#[test]
fn slot_capacity_grows_with_size() {
    let s = existence_sample();
    let small = interval_slot_bound(&s, 1);
    let large = interval_slot_bound(&s, 4);
    assert!(small.iter().zip(&large).all(|(a, b)| a < b));
    assert_eq!(small.len(), s.len());
}

#[test]
fn encoding_admits_separating_formulas() {
    if !solver_available() {
        return;
    }
    let mut solver = ExternalSolver::from_env();
    let s = existence_sample();
    for text in ["G[2,2] !q", "F[0,2] !q", "!q | F[2,2] !q"] {
        assert!(admits(&s, &int(2), &parse(text).unwrap(), &mut solver), "{text}");
    }
    // Separating but looking too far ahead.
    assert!(!admits(&s, &int(2), &parse("F[0,3] !q").unwrap(), &mut solver));
    // Within the bound but not separating.
    assert!(!admits(&s, &int(2), &parse("F[0,1] !q").unwrap(), &mut solver));
    assert!(!admits(&s, &int(2), &parse("q").unwrap(), &mut solver));
    // Until needs its left operand at the witness point too, so q never
    // releases into !q.
    assert!(!admits(&s, &int(2), &parse("q U[0,2] !q").unwrap(), &mut solver));
}

#[test]
fn encoding_admits_random_labelling_formulas() {
    if !solver_available() {
        return;
    }
    let mut solver = ExternalSolver::from_env();
    let mut r = rng(21);
    for _ in 0..12 {
        let (s, k, target) = sat_instance(&mut r, &["p", "q"], 3, 3, 3);
        assert!(admits(&s, &k, &target, &mut solver), "{target} on {}", s.to_json());
    }
}

#[test]
fn models_decode_to_verified_formulas() {
    if !solver_available() {
        return;
    }
    let mut solver = ExternalSolver::from_env();
    let mut r = rng(22);
    for _ in 0..12 {
        let (s, k, target) = sat_instance(&mut r, &["p", "q"], 3, 4, 4);
        let res = check_encoding(&s, target.size(), &k, &mut solver);
        assert!(matches!(res, Ok(Some(_))), "{target}: {res:?}");
    }
}

#[test]
fn too_small_sizes_are_unsatisfiable() {
    if !solver_available() {
        return;
    }
    let mut solver = ExternalSolver::from_env();
    let s = existence_sample();
    for n in 1..=2 {
        assert_eq!(check_encoding(&s, n, &int(2), &mut solver), Ok(None), "size {n}");
    }
}
