//! Property tests for the model invariants that benefit from
//! shrinkable random inputs.

use fso_noma::channel::{gg_sample, path_loss, TurbulenceParams};
use fso_noma::noma::{
    outage_events, rate, threshold_from_rate, ChannelDraw, OutageEvents, QosThresholds, Scheme,
    SicAssumption,
};
use fso_noma::specfun::{bessel_k, erf};
use proptest::prelude::*;
use rand::SeedableRng;

proptest! {
    #[test]
    fn rate_and_threshold_are_mutual_inverses(r in 0.0..4.0f64) {
        let back = rate(threshold_from_rate(r));
        prop_assert!((back - r).abs() <= 1e-12 * r.max(1e-9));
    }

    #[test]
    fn erf_is_odd_and_bounded(x in -30.0..30.0f64) {
        prop_assert!(erf(x).abs() <= 1.0);
        prop_assert!((erf(-x) + erf(x)).abs() < 1e-15);
    }

    #[test]
    fn bessel_k_order_symmetry(nu in 0.05..3.95f64, x in 0.05..28.0f64) {
        prop_assume!((nu - nu.round()).abs() > 2e-3);
        let a = bessel_k(nu, x).unwrap();
        let b = bessel_k(-nu, x).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(((a - b) / a).abs() < 1e-12);
    }

    #[test]
    fn path_loss_is_within_unit_interval_and_monotone(
        kappa in 0.0..0.05f64,
        d1 in 0.0..5000.0f64,
        d2 in 0.0..5000.0f64,
    ) {
        prop_assume!((d1 - d2).abs() > 1e-6);
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let p_near = path_loss(kappa, lo).unwrap();
        let p_far = path_loss(kappa, hi).unwrap();
        prop_assert!(p_near <= 1.0 && p_far > 0.0);
        prop_assert!(p_far <= p_near);
    }

    #[test]
    fn optimal_events_are_sic_invariant(
        g1 in 0.0..50.0f64,
        g2 in 0.0..50.0f64,
        t1 in 0.001..5.0f64,
        t2 in 0.001..5.0f64,
    ) {
        let draw = ChannelDraw::new(g1, g2);
        let thr = QosThresholds { gamma1_thr: t1, gamma2_thr: t2, r1_bits: 0.0, r2_bits: 0.0 };
        let events: Vec<OutageEvents> = SicAssumption::ALL
            .iter()
            .map(|&sic| outage_events(&draw, &thr, Scheme::OptimalDynamicNoma, sic))
            .collect();
        prop_assert_eq!(events[0], events[1]);
        prop_assert_eq!(events[1], events[2]);
    }

    #[test]
    fn bound_outage_implies_optimal_outage(
        g1 in 0.0..50.0f64,
        g2 in 0.0..50.0f64,
        t1 in 0.001..5.0f64,
        t2 in 0.001..5.0f64,
    ) {
        let draw = ChannelDraw::new(g1, g2);
        let thr = QosThresholds { gamma1_thr: t1, gamma2_thr: t2, r1_bits: 0.0, r2_bits: 0.0 };
        let bound = outage_events(&draw, &thr, Scheme::InterferenceFreeBound, SicAssumption::Perfect);
        let optimal = outage_events(&draw, &thr, Scheme::OptimalDynamicNoma, SicAssumption::Perfect);
        prop_assert!(!bound.bs1 || optimal.bs1);
        prop_assert!(!bound.bs2 || optimal.bs2);
    }

    #[test]
    fn gg_samples_are_positive_and_seed_stable(seed in any::<u64>()) {
        let t = TurbulenceParams::new(2.23, 1.54).unwrap();
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..16 {
            let a = gg_sample(&t, &mut r1);
            prop_assert!(a > 0.0 && a.is_finite());
            prop_assert_eq!(a, gg_sample(&t, &mut r2));
        }
    }
}
