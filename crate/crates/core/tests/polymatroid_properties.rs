use gic_core::gaussian_mac::{build_overline_mac, dummy_message, dummy_rates, hk_mac, stack_order};
use gic_core::hk_region::{build_polytope, max_wsr_value, p0_slice_check};
use gic_core::{ChannelParams, DecodingOrder, Message, PowerSplit, Receiver, Subset};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (ChannelParams, PowerSplit)> {
    (
        0.0f64..0.99,
        0.0f64..0.99,
        0.01f64..20.0,
        0.01f64..20.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
    )
        .prop_map(|(a, b, p1, p2, f1, f2)| {
            let cp = ChannelParams::new(a, b, p1, p2, 1.0).unwrap();
            let ps = PowerSplit::from_private(&cp, f1 * p1, f2 * p2).unwrap();
            (cp, ps)
        })
}

fn receiver() -> impl Strategy<Value = Receiver> {
    prop_oneof![Just(Receiver::Y1), Just(Receiver::Y2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn corner_points_telescope_to_the_full_rank((cp, ps) in instance(), rx in receiver(), k in 0usize..24) {
        let mac = build_overline_mac(&cp, &ps, rx);
        let order = &DecodingOrder::all(4)[k];
        let r = mac.corner_rates(order).unwrap();
        prop_assert!(mac.contains(&r));
        prop_assert!((r.iter().sum::<f64>() - mac.sum_rate()).abs() < 1e-12);
        let mut prefix = Subset::EMPTY;
        for &i in order.as_slice() {
            prefix = prefix.union(Subset::from_indices([i]));
            let partial: f64 = prefix.elements().map(|j| r[j]).sum();
            prop_assert!((partial - mac.rank(prefix)).abs() < 1e-12);
        }
    }

    #[test]
    fn greedy_matches_best_corner((cp, ps) in instance(), rx in receiver(), w in prop::collection::vec(0.0f64..5.0, 4)) {
        let mac = build_overline_mac(&cp, &ps, rx);
        let dot = |r: &[f64]| r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let brute = DecodingOrder::all(4)
            .iter()
            .map(|o| dot(&mac.corner_rates(o).unwrap()))
            .fold(f64::NEG_INFINITY, f64::max);
        let (greedy, _) = mac.max_weighted_sum(&w).unwrap();
        prop_assert!((dot(greedy.rates()) - brute).abs() < 1e-12);
    }

    #[test]
    fn projections_and_restrictions_stay_polymatroids((cp, ps) in instance(), rx in receiver(), mask in 1u32..15) {
        let mac = build_overline_mac(&cp, &ps, rx);
        prop_assert!(mac.check_axioms().is_valid());
        prop_assert!(mac.project_above(Subset(mask)).check_axioms().is_valid());
        prop_assert!(mac.restrict_below(Subset(mask)).check_axioms().is_valid());
    }

    #[test]
    fn cross_private_projection_is_the_three_message_region((cp, ps) in instance(), rx in receiver()) {
        let projected = build_overline_mac(&cp, &ps, rx)
            .project_above(Subset::from_indices([dummy_message(rx).index()]));
        let hk = hk_mac(&cp, &ps, rx);
        prop_assert_eq!(projected.labels(), hk.labels());
        for s in 1..8u32 {
            prop_assert!((projected.rank(Subset(s)) - hk.rank(Subset(s))).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_at_dummy_rate_reproduces_the_polytope((cp, ps) in instance(), mu in 0.0f64..8.0) {
        let report = p0_slice_check(&cp, &ps).unwrap();
        prop_assert!(report.max_residual < 1e-9);
        let hk = max_wsr_value(&build_polytope(&cp, &ps), mu);
        prop_assert!((max_wsr_value(&report.slice_polytope, mu) - hk).abs() < 1e-10);
    }

    #[test]
    fn stack_order_bottom_is_the_dummy_rate((cp, ps) in instance()) {
        let (d1, d2) = dummy_rates(&cp, &ps);
        for (rx, d) in [(Receiver::Y1, d1), (Receiver::Y2, d2)] {
            let r = build_overline_mac(&cp, &ps, rx).corner_rates(&stack_order(rx, Message::U1)).unwrap();
            prop_assert!((r[dummy_message(rx).index()] - d).abs() < 1e-14);
        }
    }
}
