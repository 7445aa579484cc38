//! δ-layer discretization of the transmit signals.
//!
//! Every message is cut into thin Gaussian layers. Each layer appears in the
//! stacks of both receivers, scaled by the cross gain at the cross receiver.
//! A layer's rate at a receiver is `C(g·δ / (σ² + received power below it))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};
use crate::gaussian_mac::{build_overline_mac, capacity, dummy_message, stack_order};
use crate::model::{
    ChannelParams, ExtendedRateVector, Message, PowerSplit, RateVector, Receiver, User,
};

/// Errors at or below this are treated as exact agreement.
pub const EXACTNESS_FLOOR: f64 = 1e-10;
/// Minimum error reduction per halving of δ.
pub const MIN_CONVERGENCE_RATIO: f64 = 1.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    DummyPrivate,
    Private,
    Public,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub owner: User,
    pub message: Message,
    pub kind: LayerKind,
    /// Transmit power of this layer.
    pub power: f64,
    pub rate_y1: Option<f64>,
    pub rate_y2: Option<f64>,
    pub assigned_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub receiver: Receiver,
    pub delta: f64,
    /// Bottom to top.
    pub layers: Vec<Layer>,
}

impl LayerStack {
    pub fn power_of(&self, owner: User) -> f64 {
        self.layers
            .iter()
            .filter(|l| l.owner == owner)
            .map(|l| l.power)
            .sum()
    }

    pub fn count_of(&self, message: Message) -> usize {
        self.layers.iter().filter(|l| l.message == message).count()
    }

    /// Kinds appear as one contiguous run each: dummy, private, public.
    pub fn follows_stack_order(&self) -> bool {
        let rank = |k: LayerKind| match k {
            LayerKind::DummyPrivate => 0,
            LayerKind::Private => 1,
            LayerKind::Public => 2,
        };
        self.layers
            .windows(2)
            .all(|w| rank(w[0].kind) <= rank(w[1].kind))
    }
}

/// Layer powers of one message: `round(power/δ)` layers, the last one taking
/// the remainder.
fn slice_power(power: f64, delta: f64) -> Vec<f64> {
    if power == 0.0 {
        return Vec::new();
    }
    let n = ((power / delta).round() as usize).max(1);
    let mut out = vec![delta; n - 1];
    out.push(power - delta * (n - 1) as f64);
    out
}

fn check_delta(ps: &PowerSplit, delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(GicError::BadDelta(format!(
            "delta = {delta} must be positive"
        )));
    }
    for m in Message::ALL {
        let p = ps.power(m);
        if p > 0.0 && delta > p * (1.0 + 1e-12) {
            return Err(GicError::BadDelta(format!(
                "delta = {delta} exceeds the {} power {p}",
                m.label()
            )));
        }
    }
    Ok(())
}

/// Public band order for weights `(1, μ)`: the heavier user's public message
/// sits lower.
pub fn public_order_for_mu(mu: f64) -> Message {
    if mu > 1.0 {
        Message::U2
    } else {
        Message::U1
    }
}

pub fn build_stacks(
    cp: &ChannelParams,
    ps: &PowerSplit,
    delta: f64,
) -> Result<(LayerStack, LayerStack)> {
    build_stacks_ordered(cp, ps, delta, Message::U1)
}

/// Stacks at `Y1` and `Y2` with `first_public` at the bottom of the public
/// band.
pub fn build_stacks_ordered(
    cp: &ChannelParams,
    ps: &PowerSplit,
    delta: f64,
    first_public: Message,
) -> Result<(LayerStack, LayerStack)> {
    check_delta(ps, delta)?;
    let slices: Vec<Vec<f64>> = Message::ALL
        .iter()
        .map(|&m| slice_power(ps.power(m), delta))
        .collect();

    // Per-receiver rate of every layer, keyed by (message, layer index).
    let mut rates = [vec![Vec::new(); 4], vec![Vec::new(); 4]];
    for (r, rx) in Receiver::BOTH.iter().enumerate() {
        let mut below = 0.0;
        for m in stack_order(*rx, first_public).as_slice() {
            let g = cp.gain(Message::from_index(*m).unwrap().owner(), *rx);
            for &p in &slices[*m] {
                rates[r][*m].push(capacity(g * p / (cp.sigma2 + below)));
                below += g * p;
            }
        }
    }

    let stacks = Receiver::BOTH.map(|rx| {
        let mut layers = Vec::new();
        for &mi in stack_order(rx, first_public).as_slice() {
            let m = Message::from_index(mi).unwrap();
            let kind = if m.is_public() {
                LayerKind::Public
            } else if m == dummy_message(rx) {
                LayerKind::DummyPrivate
            } else {
                LayerKind::Private
            };
            for (k, &p) in slices[mi].iter().enumerate() {
                let (r1, r2) = (rates[0][mi][k], rates[1][mi][k]);
                let (rate_y1, rate_y2, assigned_rate) = match (kind, rx) {
                    (LayerKind::Public, _) => (Some(r1), Some(r2), r1.min(r2)),
                    (_, Receiver::Y1) => (Some(r1), None, r1),
                    (_, Receiver::Y2) => (None, Some(r2), r2),
                };
                layers.push(Layer {
                    owner: m.owner(),
                    message: m,
                    kind,
                    power: p,
                    rate_y1,
                    rate_y2,
                    assigned_rate,
                });
            }
        }
        LayerStack {
            receiver: rx,
            delta,
            layers,
        }
    });
    let [y1, y2] = stacks;
    Ok((y1, y2))
}

/// Per-message sums of assigned rates. Public and own-private rates come from
/// the owner's stack; dummies are the cross private layers' rates.
pub fn aggregate_rates(stacks: &(LayerStack, LayerStack)) -> Result<ExtendedRateVector> {
    let (y1, y2) = stacks;
    let sum = |s: &LayerStack, m: Message| -> f64 {
        s.layers
            .iter()
            .filter(|l| l.message == m)
            .map(|l| l.assigned_rate)
            .sum()
    };
    let base = RateVector::messages([
        sum(y1, Message::U1),
        sum(y1, Message::V1),
        sum(y2, Message::U2),
        sum(y2, Message::V2),
    ])?;
    ExtendedRateVector::new(base, sum(y1, Message::V2), sum(y2, Message::V1))
}

/// Closed-form counterpart of [`aggregate_rates`]: corner points of the
/// four-input regions under the stack orders, with the public rates taken as
/// the smaller of the two receivers' values.
pub fn closed_form_rates(
    cp: &ChannelParams,
    ps: &PowerSplit,
    first_public: Message,
) -> Result<ExtendedRateVector> {
    let c1 = build_overline_mac(cp, ps, Receiver::Y1)
        .corner_rates(&stack_order(Receiver::Y1, first_public))?;
    let c2 = build_overline_mac(cp, ps, Receiver::Y2)
        .corner_rates(&stack_order(Receiver::Y2, first_public))?;
    let (u1, v1, u2, v2) = (0, 1, 2, 3);
    let base = RateVector::from_solver(
        Message::ALL.iter().map(|m| m.label().to_string()).collect(),
        vec![c1[u1].min(c2[u1]), c1[v1], c1[u2].min(c2[u2]), c2[v2]],
    )?;
    ExtendedRateVector::new(base, c1[v2], c2[v1])
}

fn max_abs_error(x: &ExtendedRateVector, y: &ExtendedRateVector) -> f64 {
    x.base
        .rates()
        .iter()
        .zip(y.base.rates())
        .map(|(a, b)| (a - b).abs())
        .chain([
            (x.dummy_v2_at_y1 - y.dummy_v2_at_y1).abs(),
            (x.dummy_v1_at_y2 - y.dummy_v1_at_y2).abs(),
        ])
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub max_abs_error: f64,
    /// Previous row's error over this one's; absent on the first row.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn exact(&self) -> bool {
        self.rows.iter().all(|r| r.max_abs_error <= EXACTNESS_FLOOR)
    }

    /// Each halving either reduces the error by [`MIN_CONVERGENCE_RATIO`] or
    /// both errors are already at the exactness floor.
    pub fn converges(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (coarse, fine) = (w[0].max_abs_error, w[1].max_abs_error);
            if coarse <= EXACTNESS_FLOOR {
                fine <= EXACTNESS_FLOOR
            } else {
                coarse >= MIN_CONVERGENCE_RATIO * fine
            }
        })
    }
}

pub fn convergence_test(
    cp: &ChannelParams,
    ps: &PowerSplit,
    delta_list: &[f64],
) -> Result<ConvergenceReport> {
    convergence_test_ordered(cp, ps, delta_list, Message::U1)
}

pub fn convergence_test_ordered(
    cp: &ChannelParams,
    ps: &PowerSplit,
    delta_list: &[f64],
    first_public: Message,
) -> Result<ConvergenceReport> {
    if delta_list.is_empty() || delta_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GicError::BadDelta(
            "delta list must be nonempty and strictly decreasing".into(),
        ));
    }
    let target = closed_form_rates(cp, ps, first_public)?;
    let errors: Vec<f64> = delta_list
        .par_iter()
        .map(|&d| {
            let stacks = build_stacks_ordered(cp, ps, d, first_public)?;
            Ok(max_abs_error(&aggregate_rates(&stacks)?, &target))
        })
        .collect::<Result<_>>()?;
    let rows = delta_list
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&delta, &e))| ConvergenceRow {
            delta,
            max_abs_error: e,
            ratio: (i > 0).then(|| errors[i - 1] / e),
        })
        .collect();
    Ok(ConvergenceReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_user_two_layers_telescope() {
        let cp = ChannelParams::new(0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        let ps = PowerSplit::from_private_with_budgets(1.0, 0.0, 1.0, 0.0).unwrap();
        let (y1, _) = build_stacks(&cp, &ps, 0.5).unwrap();
        let rates: Vec<f64> = y1.layers.iter().map(|l| l.assigned_rate).collect();
        assert_eq!(rates.len(), 2);
        assert_abs_diff_eq!(rates[0], 0.5 * 1.5f64.log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(rates[1], 0.5 * (4.0f64 / 3.0).log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(rates[0] + rates[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_cross_gain_layers_carry_no_power() {
        let cp = ChannelParams::new(0.0, 0.3, 1.0, 1.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 0.5, 0.5).unwrap();
        let (y1, _) = build_stacks(&cp, &ps, 0.25).unwrap();
        for l in y1.layers.iter().filter(|l| l.owner == User::Two) {
            assert_eq!(l.rate_y1, Some(0.0));
        }
    }

    #[test]
    fn counts_and_power_accounting() {
        let cp = ChannelParams::new(0.25, 0.25, 2.0, 1.5, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 1.2, 0.5).unwrap();
        let (y1, y2) = build_stacks(&cp, &ps, 0.1).unwrap();
        assert_eq!(y1.count_of(Message::V1), 12);
        assert_eq!(y1.count_of(Message::U1), 8);
        assert_eq!(y2.count_of(Message::V2), 5);
        assert_eq!(y2.count_of(Message::U2), 10);
        assert_abs_diff_eq!(y1.power_of(User::One), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y2.power_of(User::Two), 1.5, epsilon = 1e-12);
        assert!(y1.follows_stack_order() && y2.follows_stack_order());
    }

    #[test]
    fn remainder_goes_to_last_layer() {
        let s = slice_power(1.0, 0.3);
        assert_eq!(s.len(), 3);
        assert_abs_diff_eq!(s[2], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn public_layers_take_the_smaller_rate() {
        let cp = ChannelParams::new(0.3, 0.6, 1.0, 2.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 0.5, 1.0).unwrap();
        let (y1, y2) = build_stacks(&cp, &ps, 0.05).unwrap();
        for l in y1.layers.iter().chain(&y2.layers) {
            if l.kind == LayerKind::Public {
                assert!(
                    l.assigned_rate <= l.rate_y1.unwrap() && l.assigned_rate <= l.rate_y2.unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_bad_delta() {
        let cp = ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 1.0, 1.0).unwrap();
        assert!(matches!(
            build_stacks(&cp, &ps, 0.0),
            Err(GicError::BadDelta(_))
        ));
        assert!(matches!(
            build_stacks(&cp, &ps, 1.5),
            Err(GicError::BadDelta(_))
        ));
        assert!(convergence_test(&cp, &ps, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn dummy_aggregate_vanishes_without_private_power() {
        let cp = ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 1.0, 0.0).unwrap();
        let agg = aggregate_rates(&build_stacks(&cp, &ps, 0.1).unwrap()).unwrap();
        assert_eq!(agg.dummy_v2_at_y1, 0.0);
    }

    #[test]
    fn symmetric_split_matches_corner_points() {
        let cp = ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 1.0, 1.0).unwrap();
        let agg = aggregate_rates(&build_stacks(&cp, &ps, 1e-3).unwrap()).unwrap();
        let target = closed_form_rates(&cp, &ps, Message::U1).unwrap();
        assert!(max_abs_error(&agg, &target) < 5e-3);
    }

    #[test]
    fn convergence_table_is_exact() {
        let cp = ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 1.0, 1.0).unwrap();
        let report = convergence_test(&cp, &ps, &[1e-1, 5e-2, 2.5e-2, 1.25e-2]).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.exact());
        assert!(report.converges());
    }
}
