mod common;

use common::*;
use proptest::prelude::*;
use tropmono::poly::parse_polynomial;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_matches_brute_force(seed in any::<u64>(), three in any::<bool>()) {
        let mut r = rng(seed);
        let d = if three { 3 } else { 2 };
        let pts = random_point_set(&mut r, d);
        if let Err(e) = check_hull(&pts, d, &mut r) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn duality_on_smooth_inputs(seed in any::<u64>(), three in any::<bool>()) {
        let poly = random_smooth(&mut rng(seed), if three { 3 } else { 2 });
        if let Err(e) = check_duality(&poly) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn argmax_membership(seed in any::<u64>(), three in any::<bool>()) {
        let mut r = rng(seed);
        let poly = random_smooth(&mut r, if three { 3 } else { 2 });
        if let Err(e) = check_membership(&poly, 100, &mut r) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn trop_eval_is_convex(seed in any::<u64>()) {
        let mut r = rng(seed);
        let poly = random_smooth(&mut r, 2);
        if let Err(e) = check_convexity(&poly, &mut r) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn word_exponents_are_unimodular_invariant(seed in any::<u64>(), shift in prop::collection::vec(-4i64..5, 2)) {
        let mut r = rng(seed);
        let poly = parse_polynomial(HYPELLIP, 2).unwrap();
        let u = random_unimodular(&mut r, 2);
        if let Err(e) = check_covariance(&poly, &u, &shift) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn random_curves_are_unimodular_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let poly = random_smooth(&mut r, 2);
        let u = random_unimodular(&mut r, 2);
        if let Err(e) = check_covariance(&poly, &u, &[1, -2]) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn twist_widths_independent_of_base(seed in any::<u64>(), three in any::<bool>()) {
        let poly = random_smooth(&mut rng(seed), if three { 3 } else { 2 });
        if let Err(e) = check_frame_invariance(&complex_of(&poly)) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn lattice_length_counts_points(seed in any::<u64>()) {
        let poly = random_smooth(&mut rng(seed), 2);
        if let Err(e) = check_lattice_lengths(&complex_of(&poly)) {
            prop_assert!(false, "{}", e);
        }
    }
}

#[test]
fn frame_invariance_on_named_examples() {
    for (text, d) in [(HYPELLIP, 2), (ELLIPTIC, 2), (G, 3)] {
        check_frame_invariance(&complex(text, d)).unwrap();
    }
}

#[test]
fn lattice_lengths_on_named_examples() {
    check_lattice_lengths(&complex(HYPELLIP, 2)).unwrap();
    check_lattice_lengths(&complex(ELLIPTIC, 2)).unwrap();
}
