use gic_core::epi::{
    epi_bounds, gaussian_entropy, gaussian_equiv_power, interference_entropy_floor, EpiQuery,
};
use gic_core::gaussian_mac::{capacity, hk_mac};
use gic_core::layers::{
    aggregate_rates, build_stacks, build_stacks_ordered, closed_form_rates, LayerKind,
};
use gic_core::{ChannelParams, Message, PowerSplit, Receiver, Subset};
use proptest::prelude::*;

fn layered_instance() -> impl Strategy<Value = (ChannelParams, PowerSplit, f64)> {
    (
        0.0f64..0.99,
        0.0f64..0.99,
        0.5f64..8.0,
        0.5f64..8.0,
        0.1f64..0.9,
        0.1f64..0.9,
        2usize..20,
    )
        .prop_map(|(a, b, p1, p2, f1, f2, n)| {
            let cp = ChannelParams::new(a, b, p1, p2, 1.0).unwrap();
            let ps = PowerSplit::from_private(&cp, f1 * p1, f2 * p2).unwrap();
            let min = [ps.pu1, ps.pv1, ps.pu2, ps.pv2]
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            (cp, ps, min / n as f64)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layer_sums_equal_closed_form((cp, ps, delta) in layered_instance(), upper in any::<bool>()) {
        let first = if upper { Message::U2 } else { Message::U1 };
        let stacks = build_stacks_ordered(&cp, &ps, delta, first).unwrap();
        let agg = aggregate_rates(&stacks).unwrap();
        let target = closed_form_rates(&cp, &ps, first).unwrap();
        for (x, y) in agg.base.rates().iter().zip(target.base.rates()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((agg.dummy_v2_at_y1 - target.dummy_v2_at_y1).abs() < 1e-10);
        prop_assert!((agg.dummy_v1_at_y2 - target.dummy_v1_at_y2).abs() < 1e-10);
        prop_assert!(stacks.0.follows_stack_order() && stacks.1.follows_stack_order());
    }

    #[test]
    fn receiver_stack_sums_to_the_total_received_rate((cp, ps, delta) in layered_instance()) {
        let (y1, _) = build_stacks(&cp, &ps, delta).unwrap();
        let total: f64 = y1.layers.iter().map(|l| l.rate_y1.unwrap()).sum();
        let received = ps.pu1 + ps.pv1 + cp.a * (ps.pu2 + ps.pv2);
        prop_assert!((total - capacity(received / cp.sigma2)).abs() < 1e-10);
    }

    #[test]
    fn public_layers_never_exceed_either_receiver((cp, ps, delta) in layered_instance()) {
        let (y1, y2) = build_stacks(&cp, &ps, delta).unwrap();
        for l in y1.layers.iter().chain(&y2.layers).filter(|l| l.kind == LayerKind::Public) {
            prop_assert!(l.assigned_rate <= l.rate_y1.unwrap() && l.assigned_rate <= l.rate_y2.unwrap());
        }
    }

    #[test]
    fn epi_bounds_are_ordered(h in -5.0f64..10.0, inflate in 0.0f64..10.0) {
        let p = gaussian_equiv_power(h) * (1.0 + inflate);
        let b = epi_bounds(&EpiQuery::new(h, Some(p)));
        prop_assert!(b.lower <= b.upper.unwrap() + 1e-12);
    }

    #[test]
    fn entropy_floor_differences_give_the_rank(a in 0.0f64..0.99, p in 0.01f64..20.0, f in 0.0f64..=1.0) {
        let cp = ChannelParams::new(a, 0.5, 1.0, p, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 1.0, f * p).unwrap();
        let floor = interference_entropy_floor(&cp, &ps, Receiver::Y1);
        let own = gaussian_entropy(cp.sigma2 + cp.a * ps.pv2 + ps.pv1);
        let rank = hk_mac(&cp, &ps, Receiver::Y1).rank(Subset::from_indices([1]));
        prop_assert!((own - floor - rank).abs() < 1e-12);
    }
}

#[test]
fn gaussian_entropy_round_trips_through_equivalent_power() {
    for p in [0.25, 1.0, 4.0, 100.0] {
        assert!((gaussian_equiv_power(gaussian_entropy(p)) - p).abs() <= 1e-12 * p.max(1.0));
    }
}

#[test]
fn symmetric_split_within_tolerance_of_corner_points() {
    let cp = ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).unwrap();
    let ps = PowerSplit::new(&cp, 1.0, 1.0, 1.0, 1.0).unwrap();
    let agg = aggregate_rates(&build_stacks(&cp, &ps, 1e-3).unwrap()).unwrap();
    let target = closed_form_rates(&cp, &ps, Message::U1).unwrap();
    for (x, y) in agg.base.rates().iter().zip(target.base.rates()) {
        assert!((x - y).abs() < 5e-3);
    }
}

#[test]
fn interference_free_public_layers_carry_nothing() {
    let cp = ChannelParams::new(0.0, 0.0, 3.0, 1.0, 1.0).unwrap();
    let ps = PowerSplit::from_private(&cp, 1.5, 0.5).unwrap();
    let agg = aggregate_rates(&build_stacks(&cp, &ps, 0.05).unwrap()).unwrap();
    let r = agg.base.rates();
    // Without cross gain a public message is invisible at the cross receiver.
    assert_eq!((r[0], r[2]), (0.0, 0.0));
    assert!((r[1] - capacity(1.5)).abs() < 1e-10);
    assert!((r[3] - capacity(0.5)).abs() < 1e-10);
    assert_eq!((agg.dummy_v2_at_y1, agg.dummy_v1_at_y2), (0.0, 0.0));
}
