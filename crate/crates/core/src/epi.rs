//! Entropy-power bounds in bits.
//!
//! Entropy power is `N(X) = 2^{2h(X)} / (2πe)`. For `A` independent of unit
//! Gaussian noise, `N(A + G) ≥ N(A) + 1`, and `h(A + G)` is at most the
//! entropy of a Gaussian with power `P_A + 1`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};
use crate::model::{ChannelParams, PowerSplit, Receiver};

const TWO_PI_E: f64 = 2.0 * PI * E;

/// Tolerance of the equality case.
pub const COINCIDENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpiQuery {
    /// Differential entropy of `A` in bits.
    pub h_a: f64,
    /// Power of `A`, if known.
    pub p_a: Option<f64>,
}

impl EpiQuery {
    pub fn new(h_a: f64, p_a: Option<f64>) -> Self {
        EpiQuery { h_a, p_a }
    }

    /// A power below the Gaussian-equivalent power cannot carry `h_a` bits.
    pub fn is_consistent(&self) -> bool {
        self.p_a
            .is_none_or(|p| gaussian_equiv_power(self.h_a) <= p + COINCIDENCE_TOL)
    }
}

/// Entropy in bits of a Gaussian with the given power.
pub fn gaussian_entropy(power: f64) -> f64 {
    0.5 * (TWO_PI_E * power).log2()
}

pub fn gaussian_equiv_power(h_a: f64) -> f64 {
    (2.0 * h_a).exp2() / TWO_PI_E
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpiBounds {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl EpiBounds {
    pub fn coincide(&self) -> bool {
        self.upper
            .is_some_and(|u| (u - self.lower).abs() <= COINCIDENCE_TOL)
    }
}

/// Bounds on `h(A + G)` for unit-power Gaussian `G`.
pub fn epi_bounds(q: &EpiQuery) -> EpiBounds {
    EpiBounds {
        lower: epi_lower(q.h_a),
        upper: q.p_a.map(epi_upper),
    }
}

pub fn epi_lower(h_a: f64) -> f64 {
    0.5 * ((2.0 * h_a).exp2() + TWO_PI_E).log2()
}

pub fn epi_upper(p_a: f64) -> f64 {
    gaussian_entropy(p_a + 1.0)
}

/// Upper bound alone; needs the power.
pub fn epi_upper_bound(q: &EpiQuery) -> Result<f64> {
    q.p_a.map(epi_upper).ok_or(GicError::MissingPower)
}

/// Entropy of interference plus noise at `receiver` with Gaussian
/// interference from the cross private message.
pub fn interference_entropy_floor(cp: &ChannelParams, ps: &PowerSplit, receiver: Receiver) -> f64 {
    let interference = match receiver {
        Receiver::Y1 => cp.a * ps.pv2,
        Receiver::Y2 => cp.b * ps.pv1,
    };
    gaussian_entropy(cp.sigma2 + interference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_equivalent_power_values() {
        assert_abs_diff_eq!(
            gaussian_equiv_power(gaussian_entropy(1.0)),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            gaussian_equiv_power(gaussian_entropy(4.0)),
            4.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            gaussian_equiv_power(0.0),
            0.05854983152431917,
            epsilon = 1e-16
        );
    }

    #[test]
    fn coincidence_for_gaussian() {
        let q = EpiQuery::new(gaussian_entropy(1.0), Some(1.0));
        let b = epi_bounds(&q);
        assert_abs_diff_eq!(b.lower, 0.5 * (4.0 * PI * E).log2(), epsilon = 1e-14);
        assert!(b.coincide());
    }

    #[test]
    fn strict_gap_with_more_power() {
        let b = epi_bounds(&EpiQuery::new(gaussian_entropy(1.0), Some(2.0)));
        assert_abs_diff_eq!(
            b.upper.unwrap(),
            0.5 * (6.0 * PI * E).log2(),
            epsilon = 1e-14
        );
        assert!(b.lower < b.upper.unwrap());
    }

    #[test]
    fn vanishing_signal_leaves_noise_entropy() {
        assert_abs_diff_eq!(epi_lower(-200.0), gaussian_entropy(1.0), epsilon = 1e-14);
    }

    #[test]
    fn missing_power() {
        let q = EpiQuery::new(1.0, None);
        assert_eq!(epi_upper_bound(&q), Err(GicError::MissingPower));
        assert!(epi_bounds(&q).upper.is_none());
        assert!(q.is_consistent());
        assert!(!EpiQuery::new(gaussian_entropy(2.0), Some(1.0)).is_consistent());
    }

    #[test]
    fn interference_floor_values() {
        let cp = ChannelParams::new(0.5, 0.25, 2.0, 2.0, 1.0).unwrap();
        let ps = PowerSplit::from_private(&cp, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            interference_entropy_floor(&cp, &ps, Receiver::Y1),
            0.5 * (2.0 * TWO_PI_E).log2(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            interference_entropy_floor(&cp, &ps, Receiver::Y2),
            gaussian_entropy(1.0),
            epsilon = 1e-14
        );
    }
}
