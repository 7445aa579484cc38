//! Channel instance, power splits and rate vectors.
//!
//! Message indices are fixed across the crate: `0 = U1`, `1 = V1`, `2 = U2`,
//! `3 = V2`, where `U` is a public and `V` a private message.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};

/// Relative tolerance for the per-user power budget identity.
pub const BUDGET_REL_TOL: f64 = 1e-12;

/// Physical instance of the two-user Gaussian interference channel.
///
/// `a` scales user 2's signal at receiver 1 and `b` scales user 1's signal at
/// receiver 2 (power gains). Only the weak regime `a, b < 1` is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub a: f64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
}

fn default_sigma2() -> f64 {
    1.0
}

impl ChannelParams {
    /// Validated constructor.
    pub fn new(a: f64, b: f64, p1: f64, p2: f64, sigma2: f64) -> Result<Self> {
        validate_params(ChannelParams {
            a,
            b,
            p1,
            p2,
            sigma2,
        })
    }

    /// Same gains and noise, different budgets.
    pub fn with_budgets(&self, p1: f64, p2: f64) -> Result<Self> {
        Self::new(self.a, self.b, p1, p2, self.sigma2)
    }

    pub fn budget(&self, user: User) -> f64 {
        match user {
            User::One => self.p1,
            User::Two => self.p2,
        }
    }

    /// Gain applied to `user`'s signal at `receiver`.
    pub fn gain(&self, user: User, receiver: Receiver) -> f64 {
        match (user, receiver) {
            (User::One, Receiver::Y1) | (User::Two, Receiver::Y2) => 1.0,
            (User::Two, Receiver::Y1) => self.a,
            (User::One, Receiver::Y2) => self.b,
        }
    }
}

/// Checks a candidate instance. Never clamps.
pub fn validate_params(raw: ChannelParams) -> Result<ChannelParams> {
    for (name, value) in [("a", raw.a), ("b", raw.b)] {
        if value.is_nan() || !(0.0..1.0).contains(&value) {
            return Err(GicError::NonWeakRegime { name, value });
        }
    }
    for (name, value) in [("p1", raw.p1), ("p2", raw.p2), ("sigma2", raw.sigma2)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(GicError::NonPositive { name, value });
        }
    }
    Ok(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Receiver {
    Y1,
    Y2,
}

impl Receiver {
    pub const BOTH: [Receiver; 2] = [Receiver::Y1, Receiver::Y2];

    /// The user whose own signal this receiver decodes.
    pub fn owner(self) -> User {
        match self {
            Receiver::Y1 => User::One,
            Receiver::Y2 => User::Two,
        }
    }

    pub fn other(self) -> Receiver {
        match self {
            Receiver::Y1 => Receiver::Y2,
            Receiver::Y2 => Receiver::Y1,
        }
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Receiver::Y1 => f.write_str("Y1"),
            Receiver::Y2 => f.write_str("Y2"),
        }
    }
}

/// The four non-redundant messages, in the crate-wide index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Message {
    U1 = 0,
    V1 = 1,
    U2 = 2,
    V2 = 3,
}

impl Message {
    pub const ALL: [Message; 4] = [Message::U1, Message::V1, Message::U2, Message::V2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Message> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Message::U1 => "U1",
            Message::V1 => "V1",
            Message::U2 => "U2",
            Message::V2 => "V2",
        }
    }

    pub fn from_label(label: &str) -> Option<Message> {
        Self::ALL.into_iter().find(|m| m.label() == label)
    }

    pub fn owner(self) -> User {
        match self {
            Message::U1 | Message::V1 => User::One,
            Message::U2 | Message::V2 => User::Two,
        }
    }

    pub fn is_public(self) -> bool {
        matches!(self, Message::U1 | Message::U2)
    }

    /// Private message of `user`.
    pub fn private_of(user: User) -> Message {
        match user {
            User::One => Message::V1,
            User::Two => Message::V2,
        }
    }

    pub fn public_of(user: User) -> Message {
        match user {
            User::One => Message::U1,
            User::Two => Message::U2,
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Public/private power allocation at both transmitters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub pu1: f64,
    pub pv1: f64,
    pub pu2: f64,
    pub pv2: f64,
}

impl PowerSplit {
    /// Builds a split from private powers; public power is the remainder of
    /// each budget.
    pub fn from_private(cp: &ChannelParams, pv1: f64, pv2: f64) -> Result<Self> {
        Self::from_private_with_budgets(cp.p1, cp.p2, pv1, pv2)
    }

    /// As [`PowerSplit::from_private`] for explicit (possibly zero) budgets.
    pub fn from_private_with_budgets(p1: f64, p2: f64, pv1: f64, pv2: f64) -> Result<Self> {
        for (name, pv, p) in [("pv1", pv1, p1), ("pv2", pv2, p2)] {
            if !(pv >= 0.0) || pv > p * (1.0 + BUDGET_REL_TOL) {
                return Err(GicError::InvalidSplit(format!(
                    "{name} = {pv} outside [0, {p}]"
                )));
            }
        }
        Ok(PowerSplit {
            pu1: (p1 - pv1).max(0.0),
            pv1: pv1.min(p1),
            pu2: (p2 - pv2).max(0.0),
            pv2: pv2.min(p2),
        })
    }

    /// Every message private.
    pub fn all_private(cp: &ChannelParams) -> Self {
        PowerSplit {
            pu1: 0.0,
            pv1: cp.p1,
            pu2: 0.0,
            pv2: cp.p2,
        }
    }

    /// Explicit four-power constructor, checked against the budgets of `cp`.
    pub fn new(cp: &ChannelParams, pu1: f64, pv1: f64, pu2: f64, pv2: f64) -> Result<Self> {
        let split = PowerSplit { pu1, pv1, pu2, pv2 };
        split.check_budgets(cp.p1, cp.p2)?;
        Ok(split)
    }

    pub fn check_budgets(&self, p1: f64, p2: f64) -> Result<()> {
        for (name, v) in [
            ("pu1", self.pu1),
            ("pv1", self.pv1),
            ("pu2", self.pu2),
            ("pv2", self.pv2),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(GicError::InvalidSplit(format!("{name} = {v} is negative")));
            }
        }
        for (user, total, budget) in [(1, self.pu1 + self.pv1, p1), (2, self.pu2 + self.pv2, p2)] {
            if (total - budget).abs() > BUDGET_REL_TOL * budget.abs().max(f64::MIN_POSITIVE) {
                return Err(GicError::InvalidSplit(format!(
                    "user {user} allocates {total}, budget is {budget}"
                )));
            }
        }
        Ok(())
    }

    /// Transmit power of a message.
    pub fn power(&self, m: Message) -> f64 {
        match m {
            Message::U1 => self.pu1,
            Message::V1 => self.pv1,
            Message::U2 => self.pu2,
            Message::V2 => self.pv2,
        }
    }

    pub fn public_power(&self) -> f64 {
        self.pu1 + self.pu2
    }
}

/// Nonnegative rates (bits per channel use) keyed by message labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateVector {
    labels: Vec<String>,
    rates: Vec<f64>,
}

/// Values within this distance below zero are treated as round-off when a
/// solver produces a rate vector.
pub const SOLVER_NEG_SLACK: f64 = 1e-9;

impl RateVector {
    pub fn new(labels: Vec<String>, rates: Vec<f64>) -> Result<Self> {
        if labels.len() != rates.len() {
            return Err(GicError::DimensionMismatch {
                expected: labels.len(),
                got: rates.len(),
            });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GicError::InvalidRates(format!("duplicate label {l}")));
            }
        }
        if let Some((i, r)) = rates
            .iter()
            .enumerate()
            .find(|(_, r)| !(**r >= 0.0) || !r.is_finite())
        {
            return Err(GicError::InvalidRates(format!("rate {i} = {r}")));
        }
        Ok(RateVector { labels, rates })
    }

    /// Builds a rate vector from solver output, absorbing negative round-off
    /// no larger than [`SOLVER_NEG_SLACK`].
    pub fn from_solver(labels: Vec<String>, rates: Vec<f64>) -> Result<Self> {
        let rates = rates
            .into_iter()
            .map(|r| {
                if (-SOLVER_NEG_SLACK..0.0).contains(&r) {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        Self::new(labels, rates)
    }

    /// Rates over the four messages in index order.
    pub fn messages(rates: [f64; 4]) -> Result<Self> {
        Self::from_solver(
            Message::ALL.iter().map(|m| m.label().to_string()).collect(),
            rates.to_vec(),
        )
    }

    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        RateVector {
            labels,
            rates: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.rates[i])
    }

    pub fn total(&self) -> f64 {
        self.rates.iter().sum()
    }
}

/// Rates of the four non-redundant messages plus the two dummy private
/// messages that account for interference at the cross receivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedRateVector {
    pub base: RateVector,
    pub dummy_v2_at_y1: f64,
    pub dummy_v1_at_y2: f64,
}

impl ExtendedRateVector {
    pub fn new(base: RateVector, dummy_v2_at_y1: f64, dummy_v1_at_y2: f64) -> Result<Self> {
        if base.len() != 4 {
            return Err(GicError::DimensionMismatch {
                expected: 4,
                got: base.len(),
            });
        }
        if !(dummy_v2_at_y1 >= 0.0) || !(dummy_v1_at_y2 >= 0.0) {
            return Err(GicError::InvalidRates(format!(
                "dummy rates ({dummy_v2_at_y1}, {dummy_v1_at_y2}) must be nonnegative"
            )));
        }
        Ok(ExtendedRateVector {
            base,
            dummy_v2_at_y1,
            dummy_v1_at_y2,
        })
    }
}
