//! Gaussian multiple-access regions seen at each receiver.
//!
//! At `Y1` the four messages arrive with powers `(pu1, pv1, a·pu2, a·pv2)`,
//! at `Y2` with `(b·pu1, b·pv1, pu2, pv2)`. The four-input region treats the
//! cross user's private message as a decodable "dummy" message; the HK
//! three-message region treats it as noise.

use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};
use crate::model::{ChannelParams, Message, PowerSplit, Receiver};
use crate::polymatroid::{DecodingOrder, Polymatroid, Subset};

/// `0.5 log2(1 + snr)`.
pub fn capacity(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

/// Received per-message powers at one receiver, in message index order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverPowers {
    pub receiver: Receiver,
    pub powers: [f64; 4],
    pub noise: f64,
}

impl ReceiverPowers {
    pub fn power(&self, m: Message) -> f64 {
        self.powers[m.index()]
    }

    /// Total received power of the messages in `s` (message-index mask).
    pub fn total(&self, s: Subset) -> f64 {
        s.elements().map(|i| self.powers[i]).sum()
    }
}

pub fn received_powers(cp: &ChannelParams, ps: &PowerSplit, receiver: Receiver) -> ReceiverPowers {
    let mut powers = [0.0; 4];
    for m in Message::ALL {
        powers[m.index()] = cp.gain(m.owner(), receiver) * ps.power(m);
    }
    ReceiverPowers {
        receiver,
        powers,
        noise: cp.sigma2,
    }
}

/// `0.5 log2(1 + P(decoded) / (noise + P(as_noise)))`.
pub fn gaussian_rank(rp: &ReceiverPowers, decoded: Subset, as_noise: Subset) -> Result<f64> {
    let overlap = decoded.intersection(as_noise);
    if !overlap.is_empty() {
        return Err(GicError::OverlappingSets(overlap.0));
    }
    Ok(capacity(
        rp.total(decoded) / (rp.noise + rp.total(as_noise)),
    ))
}

fn message_labels(messages: &[Message]) -> Vec<String> {
    messages.iter().map(|m| m.label().to_string()).collect()
}

/// Lifts a local subset over `ground` to a message-index mask.
fn to_message_mask(ground: &[Message], s: Subset) -> Subset {
    Subset::from_indices(s.elements().map(|k| ground[k].index()))
}

/// Four-input region at `receiver`: every message decodable, nothing treated
/// as noise. Ground set is `(U1, V1, U2, V2)`.
pub fn build_overline_mac(cp: &ChannelParams, ps: &PowerSplit, receiver: Receiver) -> Polymatroid {
    let rp = received_powers(cp, ps, receiver);
    Polymatroid::from_fn(message_labels(&Message::ALL), |s| {
        capacity(rp.total(s) / rp.noise)
    })
    .expect("four messages are within the ground-set limit")
}

/// Cross private message treated as interference at `receiver`.
pub fn dummy_message(receiver: Receiver) -> Message {
    Message::private_of(receiver.owner().other())
}

/// Messages the HK region at `receiver` decodes, in index order.
pub fn hk_ground(receiver: Receiver) -> [Message; 3] {
    match receiver {
        Receiver::Y1 => [Message::U1, Message::V1, Message::U2],
        Receiver::Y2 => [Message::U1, Message::U2, Message::V2],
    }
}

/// Three-message HK region at `receiver`: both public messages and the own
/// private message, with the cross private message as noise.
pub fn hk_mac(cp: &ChannelParams, ps: &PowerSplit, receiver: Receiver) -> Polymatroid {
    let rp = received_powers(cp, ps, receiver);
    let ground = hk_ground(receiver);
    let noise = rp.noise + rp.power(dummy_message(receiver));
    Polymatroid::from_fn(message_labels(&ground), |s| {
        capacity(rp.total(to_message_mask(&ground, s)) / noise)
    })
    .expect("three messages are within the ground-set limit")
}

/// Bottom-of-stack dummy rates `(dummy V2 at Y1, dummy V1 at Y2)`:
/// `0.5 log2(1 + a·pv2/σ²)` and `0.5 log2(1 + b·pv1/σ²)`.
pub fn dummy_rates(cp: &ChannelParams, ps: &PowerSplit) -> (f64, f64) {
    (
        capacity(cp.a * ps.pv2 / cp.sigma2),
        capacity(cp.b * ps.pv1 / cp.sigma2),
    )
}

/// Sum-rate front of the four-input region at `receiver` from the budgets
/// alone: `0.5 log2(1 + (p1 + a·p2)/σ²)` at `Y1`, `0.5 log2(1 + (b·p1 + p2)/σ²)`
/// at `Y2`.
pub fn sum_rate_front(cp: &ChannelParams, receiver: Receiver) -> f64 {
    let total = match receiver {
        Receiver::Y1 => cp.p1 + cp.a * cp.p2,
        Receiver::Y2 => cp.b * cp.p1 + cp.p2,
    };
    capacity(total / cp.sigma2)
}

/// Stack order at `receiver`, bottom to top: cross dummy private message, own
/// private message, then the two public messages (`first_public` below the
/// other one).
pub fn stack_order(receiver: Receiver, first_public: Message) -> DecodingOrder {
    let second_public = match first_public {
        Message::U1 => Message::U2,
        Message::U2 => Message::U1,
        _ => Message::U2,
    };
    let first_public = if first_public.is_public() {
        first_public
    } else {
        Message::U1
    };
    DecodingOrder::new(vec![
        dummy_message(receiver).index(),
        Message::private_of(receiver.owner()).index(),
        first_public.index(),
        second_public.index(),
    ])
    .expect("stack order is a permutation of the four messages")
}
