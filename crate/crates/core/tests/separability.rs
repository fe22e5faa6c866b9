mod support;

use mtl_synth::rational::{int, ratio};
use mtl_synth::separability::{infix_occurs_in, is_k_infix_separable};
use mtl_synth::signal::Sample;
use proptest::prelude::*;
use rand::Rng;
use support::*;

#[test]
fn existence_sample_needs_lookahead_two() {
    let s = existence_sample();
    let one = is_k_infix_separable(&s, &int(1)).unwrap();
    assert!(!one.is_separable());
    assert_eq!(one.first_inseparable(), Some(0));
    let two = is_k_infix_separable(&s, &int(2)).unwrap();
    assert!(two.is_separable());
}

#[test]
fn witnesses_do_not_occur_in_positives() {
    let s = existence_sample();
    let report = is_k_infix_separable(&s, &int(2)).unwrap();
    let w = report.witnesses[0].as_ref().unwrap();
    assert!(&w.t2 - &w.t1 <= int(2));
    for x in s.positive() {
        assert!(!infix_occurs_in(&w.infix, x));
    }
}

#[test]
fn negative_bound_is_rejected() {
    assert!(is_k_infix_separable(&existence_sample(), &int(-1)).is_err());
}

#[test]
fn zero_lookahead_compares_single_valuations() {
    let s = size_one_sample();
    assert!(is_k_infix_separable(&s, &int(0)).unwrap().is_separable());
    let x = prefix(int(2), &[(int(0), &["p"]), (int(1), &[])]);
    let y = prefix(int(2), &[(int(0), &[]), (int(1), &["p"])]);
    let s = Sample::new(int(2), props(&["p"]), vec![x], vec![y]).unwrap();
    assert!(!is_k_infix_separable(&s, &int(0)).unwrap().is_separable());
    // Any positive-length window across the rising edge of y is new.
    assert!(is_k_infix_separable(&s, &ratio(1, 4)).unwrap().is_separable());
}

#[test]
fn dense_grid_agreement_on_random_samples() {
    let mut r = rng(7);
    let mut seen = [0usize; 2];
    for case in 0..100 {
        let s = rand_sample(&mut r, &["p"], 4, 2, 3, 2);
        let k = ratio(r.gen_range(0..=6), 2);
        let fast = is_k_infix_separable(&s, &k).unwrap().is_separable();
        assert_eq!(fast, dense_grid_separable(&s, &k), "case {case} K={k}: {}", s.to_json());
        seen[fast as usize] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10, "unbalanced cases {seen:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separability_is_monotone_in_k(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = rand_sample(&mut r, &["p", "q"], 4, 2, 3, 2);
        let k = ratio(r.gen_range(0..=6), 2);
        if is_k_infix_separable(&s, &k).unwrap().is_separable() {
            prop_assert!(is_k_infix_separable(&s, &(k + ratio(1, 2))).unwrap().is_separable());
        }
    }

    #[test]
    fn every_witness_is_short_and_absent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = rand_sample(&mut r, &["p", "q"], 5, 2, 4, 2);
        let k = ratio(r.gen_range(0..=6), 2);
        for w in is_k_infix_separable(&s, &k).unwrap().witnesses.into_iter().flatten() {
            prop_assert!(&w.t2 - &w.t1 <= k);
            prop_assert!(s.positive().iter().all(|x| !infix_occurs_in(&w.infix, x)));
        }
    }
}
