//! Property tests over seeded random instances.

use contraction_core::contraction::{
    estimate_min_constants, verify, ContractionKind, KindTag, MinConstantsOutcome,
};
use contraction_core::instances::{
    applicable_instance, conforming_space, fit_kind, random_map, random_semimetric,
};
use contraction_core::solver::{a_priori_bound, picard_iterate, IterationOptions};
use contraction_core::space::{
    check_generalized_triangle, continuity_harness, minimal_b_constant, Battery, FiniteSpace,
    IntervalSpace,
};
use contraction_core::TriangleFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strong triangle inequality, checked directly.
fn is_ultrametric(s: &FiniteSpace) -> bool {
    let n = s.len();
    (0..n).all(|x| {
        (0..n)
            .all(|y| (0..n).all(|z| s.d(x, y) <= s.d(x, z).max(s.d(z, y)) * (1.0 + 1e-12) + 1e-12))
    })
}

fn single_beta(outcome: &MinConstantsOutcome) -> Option<f64> {
    match outcome {
        MinConstantsOutcome::Single { beta, .. } => *beta,
        _ => panic!("expected a single constant"),
    }
}

fn tag_strategy() -> impl Strategy<Value = KindTag> {
    prop::sample::select(KindTag::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimal_b_constant_is_tight(seed in any::<u64>(), n in 2usize..=8) {
        let s = random_semimetric(&mut rng(seed), n);
        let k = minimal_b_constant(&s).unwrap();
        prop_assert!(k >= 1.0);
        let at = TriangleFunction::BScaled { k };
        prop_assert!(check_generalized_triangle(&s, &at).unwrap().holds());
        let below = TriangleFunction::BScaled { k: k * (1.0 - 1e-6) };
        prop_assert!(!check_generalized_triangle(&s, &below).unwrap().holds());
    }

    #[test]
    fn max_passes_exactly_on_ultrametrics(seed in any::<u64>(), n in 3usize..=7, closed in any::<bool>()) {
        let mut r = rng(seed);
        let s = if closed {
            conforming_space(&mut r, n, &TriangleFunction::Max).unwrap()
        } else {
            random_semimetric(&mut r, n)
        };
        let passes = check_generalized_triangle(&s, &TriangleFunction::Max).unwrap().holds();
        prop_assert_eq!(passes, is_ultrametric(&s));
    }

    #[test]
    fn metric_spaces_pass_under_additive(seed in any::<u64>(), n in 3usize..=8) {
        let s = conforming_space(&mut rng(seed), n, &TriangleFunction::Additive).unwrap();
        prop_assert!(check_generalized_triangle(&s, &TriangleFunction::Additive).unwrap().holds());
        prop_assert!(minimal_b_constant(&s).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn verification_is_monotone_in_the_constants(
        seed in any::<u64>(),
        tag in tag_strategy(),
        bump_a in 0.0..0.5f64,
        bump_b in 0.0..0.5f64,
    ) {
        let mut r = rng(seed);
        let n = r.random_range(3..=8);
        let s = random_semimetric(&mut r, n);
        let t = random_map(&mut r, n);
        if let Some(k) = fit_kind(&s, &t, tag).unwrap() {
            prop_assert!(verify(&s, &t, &k).unwrap().passed());
            let (a, b) = k.constants();
            let larger = k.with_constants(a + bump_a, b + bump_b).unwrap();
            prop_assert!(verify(&s, &t, &larger).unwrap().passed());
        }
    }

    #[test]
    fn single_constant_estimates_are_tight(
        seed in any::<u64>(),
        cb in any::<bool>(),
    ) {
        let tag = if cb { KindTag::ChatterjeaBianchini } else { KindTag::Bianchini };
        let mut r = rng(seed);
        let n = r.random_range(3..=8);
        let s = random_semimetric(&mut r, n);
        let t = random_map(&mut r, n);
        let est = estimate_min_constants(&s, &t, tag).unwrap();
        if let Some(beta) = single_beta(&est.outcome) {
            let above = ContractionKind::single(tag, beta * (1.0 + 1e-9)).unwrap();
            prop_assert!(verify(&s, &t, &above).unwrap().passed());
            if beta > 0.0 {
                let below = ContractionKind::single(tag, beta * (1.0 - 1e-6)).unwrap();
                prop_assert!(!verify(&s, &t, &below).unwrap().passed());
            }
        }
    }

    #[test]
    fn zero_constant_chatterjea_bianchini_means_collapsing_images(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(3..=8);
        let s = random_semimetric(&mut r, n);
        let t = random_map(&mut r, n);
        let k = ContractionKind::ChatterjeaBianchini { beta: 0.0 };
        let collapses = (0..n).all(|x| (0..n).all(|y| s.d(t.images[x], t.images[y]) == 0.0));
        prop_assert_eq!(verify(&s, &t, &k).unwrap().passed(), collapses);
    }

    #[test]
    fn dual_weak_orbits_contract_at_rate_alpha(seed in any::<u64>()) {
        let mut r = rng(seed);
        let phis = [TriangleFunction::Additive, TriangleFunction::Power { q: 0.5 }];
        let Some(inst) = applicable_instance(&mut r, KindTag::WeakDual, &phis, 2_000).unwrap() else {
            return Ok(());
        };
        let (alpha, _) = inst.kind.constants();
        for x0 in 0..inst.space.len() {
            let tr = picard_iterate(&inst.space, &inst.map, x0, &IterationOptions::default()).unwrap();
            for w in tr.step_dists.windows(2) {
                prop_assert!(w[1] <= alpha * w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn a_priori_bound_decreases_to_zero(
        alpha in 0.0..0.99f64,
        d01 in 1e-6..10.0f64,
        which in 0usize..4,
        q in 0.2..4.0f64,
    ) {
        let phi = [
            TriangleFunction::Additive,
            TriangleFunction::Max,
            TriangleFunction::Power { q },
            TriangleFunction::BScaled { k: 1.0 },
        ][which].clone();
        let mut prev = f64::INFINITY;
        for n in 0..50 {
            let b = a_priori_bound(&phi, alpha, n, d01).unwrap();
            prop_assert!(b <= prev);
            prev = b;
        }
        prop_assert!(a_priori_bound(&phi, alpha, 20_000, d01).unwrap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn euclidean_distance_is_continuous_for_named_families(
        lo in -5.0..5.0f64,
        width in 0.5..10.0f64,
        which in 0usize..3,
        // Below about 0.45 the 1/sqrt(n) null sequence decays too slowly for
        // the double-precision tail window.
        q in 0.5..5.0f64,
    ) {
        let s = IntervalSpace::euclidean(lo, lo + width).unwrap();
        let phi = [TriangleFunction::Additive, TriangleFunction::Max, TriangleFunction::Power { q }][which].clone();
        let r = continuity_harness(&s, &phi, &Battery::standard(&s)).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
        prop_assert!(r.pairs.iter().all(|o| o.accepted));
    }
}
