//! Outer optimization over power splits.
//!
//! The inner problem (fixed split) is the exact vertex-enumeration LP from
//! [`crate::hk_region`]. The outer problem is a derivative-free search over
//! the two private powers: a coarse grid followed by pattern search with a
//! halving step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};
use crate::gaussian_mac::{capacity, dummy_rates, sum_rate_front};
use crate::hk_region::{
    build_polytope, max_wsr_over_polytope, max_wsr_value, Dominant, WsrSolution,
};
use crate::model::{ChannelParams, PowerSplit, Receiver};

/// Strict-improvement threshold for moving the incumbent.
const IMPROVEMENT_TOL: f64 = 1e-12;
/// Golden-section stopping width, in power units.
const GOLDEN_TOL: f64 = 1e-10;

/// Grid sizes and refinement depth of the searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Points per axis of the all-private power grid.
    pub all_private_grid: usize,
    /// Points per axis of the coarse split grid.
    pub split_grid: usize,
    /// Step-halving rounds after the coarse split grid.
    pub refine_rounds: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            all_private_grid: 256,
            split_grid: 64,
            refine_rounds: 8,
        }
    }
}

impl SearchConfig {
    /// Final split-search step as a fraction of the budget.
    pub fn resolution(&self) -> f64 {
        1.0 / ((self.split_grid.max(2) - 1) as f64 * 2f64.powi(self.refine_rounds as i32))
    }

    fn validate(&self) -> Result<()> {
        if self.all_private_grid < 2 || self.split_grid < 2 {
            return Err(GicError::InvalidArgument(
                "grids need at least two points per axis".into(),
            ));
        }
        Ok(())
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu >= 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(GicError::InvalidArgument(format!(
            "mu = {mu} must be finite and >= 0"
        )))
    }
}

/// Optimum with both users sending private messages only, each treating the
/// other as noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllPrivateSolution {
    pub mu: f64,
    pub used_powers: (f64, f64),
    pub rates: (f64, f64),
    pub objective: f64,
}

/// Rates when user 1 sends `q1` and user 2 sends `q2`, all private.
pub fn all_private_rates(cp: &ChannelParams, q1: f64, q2: f64) -> (f64, f64) {
    (
        capacity(q1 / (cp.sigma2 + cp.a * q2)),
        capacity(q2 / (cp.sigma2 + cp.b * q1)),
    )
}

fn all_private_objective(cp: &ChannelParams, mu: f64, q1: f64, q2: f64) -> f64 {
    let (r1, r2) = all_private_rates(cp, q1, q2);
    r1 + mu * r2
}

/// Maximizer of a 1-D function on `[lo, hi]` by golden-section search,
/// compared against both endpoints.
fn golden_max<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))].into_iter().fold(
        (mid, f64::NEG_INFINITY),
        |best, cand| if cand.1 > best.1 { cand } else { best },
    )
}

pub fn all_private_optimum(cp: &ChannelParams, mu: f64) -> Result<AllPrivateSolution> {
    all_private_optimum_with(cp, mu, &SearchConfig::default())
}

/// Grid search over `[0, p1] x [0, p2]`, coordinate-wise golden-section
/// refinement, then a common scale-up: scaling both powers by `t > 1` raises
/// both SINRs, so the optimum always has one user at full power.
pub fn all_private_optimum_with(
    cp: &ChannelParams,
    mu: f64,
    cfg: &SearchConfig,
) -> Result<AllPrivateSolution> {
    check_mu(mu)?;
    cfg.validate()?;
    let n = cfg.all_private_grid;
    let step1 = cp.p1 / (n - 1) as f64;
    let step2 = cp.p2 / (n - 1) as f64;
    let f = |q1: f64, q2: f64| all_private_objective(cp, mu, q1, q2);

    let mut best = (cp.p1, cp.p2, f(cp.p1, cp.p2));
    for i in (0..n).rev() {
        let q1 = if i == n - 1 { cp.p1 } else { step1 * i as f64 };
        for j in (0..n).rev() {
            let q2 = if j == n - 1 { cp.p2 } else { step2 * j as f64 };
            let v = f(q1, q2);
            if v > best.2 + IMPROVEMENT_TOL {
                best = (q1, q2, v);
            }
        }
    }

    let (mut q1, mut q2, mut value) = best;
    for _ in 0..100 {
        let before = value;
        let (c1, v1) = golden_max((q1 - step1).max(0.0), (q1 + step1).min(cp.p1), |x| f(x, q2));
        if v1 > value {
            q1 = c1;
            value = v1;
        }
        let (c2, v2) = golden_max((q2 - step2).max(0.0), (q2 + step2).min(cp.p2), |y| f(q1, y));
        if v2 > value {
            q2 = c2;
            value = v2;
        }
        if value - before <= IMPROVEMENT_TOL {
            break;
        }
    }

    let scale = [(q1, cp.p1), (q2, cp.p2)]
        .iter()
        .filter(|(q, _)| *q > 0.0)
        .map(|(q, p)| p / q)
        .fold(f64::INFINITY, f64::min);
    if scale.is_finite() && scale > 1.0 {
        let (s1, s2) = ((q1 * scale).min(cp.p1), (q2 * scale).min(cp.p2));
        let v = f(s1, s2);
        if v >= value {
            q1 = s1;
            q2 = s2;
            value = v;
        }
    }
    if q1 == 0.0 && q2 == 0.0 {
        q1 = cp.p1;
        value = f(q1, q2);
    }
    Ok(AllPrivateSolution {
        mu,
        used_powers: (q1, q2),
        rates: all_private_rates(cp, q1, q2),
        objective: value,
    })
}

/// Largest used fraction of a budget: `max(q1/p1, q2/p2)`.
pub fn full_power_fraction(cp: &ChannelParams, sol: &AllPrivateSolution) -> f64 {
    (sol.used_powers.0 / cp.p1).max(sol.used_powers.1 / cp.p2)
}

/// Optimal split and the LP solution at that split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HkOptimum {
    pub solution: WsrSolution,
    pub split: PowerSplit,
}

pub fn max_wsr(cp: &ChannelParams, mu: f64) -> Result<(WsrSolution, PowerSplit)> {
    let opt = max_wsr_with(cp, mu, &SearchConfig::default())?;
    Ok((opt.solution, opt.split))
}

pub fn max_wsr_with(cp: &ChannelParams, mu: f64, cfg: &SearchConfig) -> Result<HkOptimum> {
    max_wsr_with_budgets(cp, cp.p1, cp.p2, mu, cfg)
}

/// Split-space objective: LP optimum at private powers `(pv1, pv2)`.
pub fn split_objective(cp: &ChannelParams, p1: f64, p2: f64, pv1: f64, pv2: f64, mu: f64) -> f64 {
    match PowerSplit::from_private_with_budgets(p1, p2, pv1, pv2) {
        Ok(split) => max_wsr_value(&build_polytope(cp, &split), mu),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Outer search for explicit budgets, which may be zero (the gains and noise
/// of `cp` are used, its budgets ignored).
///
/// Grid points are scanned from full private power downwards and the
/// incumbent only moves on strict improvement, so ties favour private power.
pub fn max_wsr_with_budgets(
    cp: &ChannelParams,
    p1: f64,
    p2: f64,
    mu: f64,
    cfg: &SearchConfig,
) -> Result<HkOptimum> {
    check_mu(mu)?;
    cfg.validate()?;
    if !(p1 >= 0.0) || !(p2 >= 0.0) {
        return Err(GicError::InvalidArgument(format!(
            "budgets ({p1}, {p2}) must be >= 0"
        )));
    }
    let n = cfg.split_grid;
    let axis = |p: f64| -> Vec<f64> {
        if p == 0.0 {
            return vec![0.0];
        }
        (0..n)
            .rev()
            .map(|i| {
                if i == n - 1 {
                    p
                } else {
                    p * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    };
    let (axis1, axis2) = (axis(p1), axis(p2));
    let points: Vec<(f64, f64)> = axis1
        .iter()
        .flat_map(|&x| axis2.iter().map(move |&y| (x, y)))
        .collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(x, y)| split_objective(cp, p1, p2, x, y, mu))
        .collect();
    let mut best = (points[0].0, points[0].1, values[0]);
    for (&(x, y), &v) in points.iter().zip(&values).skip(1) {
        if v > best.2 + IMPROVEMENT_TOL {
            best = (x, y, v);
        }
    }

    // Warm start from the all-private optimum, which need not lie on the grid.
    if p1 > 0.0 && p2 > 0.0 {
        let budget_cp = cp.with_budgets(p1, p2)?;
        let ap = all_private_optimum_with(&budget_cp, mu, cfg)?;
        let (x, y) = ap.used_powers;
        let v = split_objective(cp, p1, p2, x, y, mu);
        if v > best.2 + IMPROVEMENT_TOL {
            best = (x, y, v);
        }
    }

    const OFFSETS: [(f64, f64); 8] = [
        (1.0, 1.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (0.0, -1.0),
        (-1.0, 0.0),
        (-1.0, -1.0),
    ];
    let (mut h1, mut h2) = (p1 / (n - 1) as f64, p2 / (n - 1) as f64);
    for _ in 0..cfg.refine_rounds {
        h1 *= 0.5;
        h2 *= 0.5;
        for _ in 0..64 {
            let candidates: Vec<(f64, f64)> = OFFSETS
                .iter()
                .map(|(d1, d2)| {
                    (
                        (best.0 + d1 * h1).clamp(0.0, p1),
                        (best.1 + d2 * h2).clamp(0.0, p2),
                    )
                })
                .filter(|&(x, y)| x != best.0 || y != best.1)
                .collect();
            let values: Vec<f64> = candidates
                .par_iter()
                .map(|&(x, y)| split_objective(cp, p1, p2, x, y, mu))
                .collect();
            let mut moved = false;
            let mut next = best;
            for (&(x, y), &v) in candidates.iter().zip(&values) {
                if v > next.2 + IMPROVEMENT_TOL {
                    next = (x, y, v);
                    moved = true;
                }
            }
            best = next;
            if !moved {
                break;
            }
        }
    }

    let split = PowerSplit::from_private_with_budgets(p1, p2, best.0, best.1)?;
    let solution = max_wsr_over_polytope(&build_polytope(cp, &split), mu)?;
    Ok(HkOptimum { solution, split })
}

/// Private powers at the optimum and the outcome of re-solving with those
/// powers as the budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationResult {
    pub mu: f64,
    pub p_hat_1: f64,
    pub p_hat_2: f64,
    /// Dummy rate at `Y1` at the saturation split.
    pub r_sat_1: f64,
    /// Dummy rate at `Y2` at the saturation split.
    pub r_sat_2: f64,
    pub residual_public_power: f64,
    pub tolerance: f64,
    pub verified: bool,
}

pub fn saturation_levels(cp: &ChannelParams, mu: f64) -> Result<SaturationResult> {
    saturation_levels_with(cp, mu, &SearchConfig::default())
}

/// Re-solves with budgets equal to the optimal private powers and measures
/// how much public power the new optimum allocates. Verified when that
/// residual is within one search step; an error beyond ten steps.
pub fn saturation_levels_with(
    cp: &ChannelParams,
    mu: f64,
    cfg: &SearchConfig,
) -> Result<SaturationResult> {
    let first = max_wsr_with(cp, mu, cfg)?;
    let (p_hat_1, p_hat_2) = (first.split.pv1, first.split.pv2);
    let (r_sat_1, r_sat_2) = dummy_rates(cp, &first.split);
    let nested = max_wsr_with_budgets(cp, p_hat_1, p_hat_2, mu, cfg)?;
    let residual = nested.split.public_power();
    let tolerance = cfg.resolution() * (p_hat_1 + p_hat_2);
    if residual > 10.0 * tolerance {
        return Err(GicError::VerificationFailed {
            mu,
            residual,
            tolerance,
        });
    }
    Ok(SaturationResult {
        mu,
        p_hat_1,
        p_hat_2,
        r_sat_1,
        r_sat_2,
        residual_public_power: residual,
        tolerance,
        verified: residual <= tolerance,
    })
}

/// One supporting-line point of the traced boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub mu: f64,
    pub r1: f64,
    pub r2: f64,
    pub rates: [f64; 4],
    pub objective: f64,
    pub split: PowerSplit,
    pub dominant: Dominant,
    pub tight: Vec<String>,
}

impl BoundaryPoint {
    pub fn from_optimum(opt: &HkOptimum) -> Self {
        let (r1, r2) = opt.solution.user_rates();
        BoundaryPoint {
            mu: opt.solution.mu,
            r1,
            r2,
            rates: opt.solution.point(),
            objective: opt.solution.objective,
            split: opt.split,
            dominant: opt.solution.dominant,
            tight: opt.solution.tight.clone(),
        }
    }
}

pub fn check_mu_list(mu_list: &[f64]) -> Result<()> {
    if mu_list.is_empty() {
        return Err(GicError::InvalidArgument("empty mu list".into()));
    }
    for &mu in mu_list {
        check_mu(mu)?;
    }
    if mu_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GicError::InvalidArgument(
            "mu list must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `2^-4 .. 2^4` in 33 log-spaced steps.
pub fn default_mu_grid() -> Vec<f64> {
    (0..33).map(|k| 2f64.powf(-4.0 + k as f64 / 4.0)).collect()
}

pub fn trace_boundary(cp: &ChannelParams, mu_list: &[f64]) -> Result<Vec<BoundaryPoint>> {
    trace_boundary_with(cp, mu_list, &SearchConfig::default())
}

pub fn trace_boundary_with(
    cp: &ChannelParams,
    mu_list: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<BoundaryPoint>> {
    Ok(solve_sweep_with(cp, mu_list, cfg)?
        .iter()
        .map(BoundaryPoint::from_optimum)
        .collect())
}

/// Full optima for every mu, in input order.
pub fn solve_sweep_with(
    cp: &ChannelParams,
    mu_list: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<HkOptimum>> {
    check_mu_list(mu_list)?;
    mu_list
        .par_iter()
        .map(|&mu| max_wsr_with(cp, mu, cfg))
        .collect()
}

/// Upper bound on `R1 + mu R2` through one receiver's sum-rate front.
///
/// At `Y1`: `max(1, mu) * front(Y1) + mu * C(p2/σ²)`, since the three
/// messages decoded at `Y1` share that front and `R_V2` is at most its
/// interference-free capacity; symmetrically at `Y2`.
pub fn single_mac_bound(cp: &ChannelParams, mu: f64, receiver: Receiver) -> f64 {
    let front = sum_rate_front(cp, receiver);
    match receiver {
        Receiver::Y1 => mu.max(1.0) * front + mu * capacity(cp.p2 / cp.sigma2),
        Receiver::Y2 => mu.max(1.0) * front + capacity(cp.p1 / cp.sigma2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mu: f64,
    pub all_private: f64,
    pub full: f64,
}

impl ComparisonRow {
    pub fn gap(&self) -> f64 {
        self.full - self.all_private
    }
}

/// All-private versus full-HK objectives over a mu sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// First and last mu where both objectives agree within 1e-6.
    pub agreement: Option<(f64, f64)>,
    /// Whether the agreeing mu values form one contiguous run.
    pub contiguous: bool,
}

pub const AGREEMENT_TOL: f64 = 1e-6;

pub fn all_private_vs_full(cp: &ChannelParams, mu_list: &[f64]) -> Result<Comparison> {
    all_private_vs_full_with(cp, mu_list, &SearchConfig::default())
}

pub fn all_private_vs_full_with(
    cp: &ChannelParams,
    mu_list: &[f64],
    cfg: &SearchConfig,
) -> Result<Comparison> {
    check_mu_list(mu_list)?;
    let rows: Vec<ComparisonRow> = mu_list
        .par_iter()
        .map(|&mu| -> Result<ComparisonRow> {
            let ap = all_private_optimum_with(cp, mu, cfg)?;
            let full = max_wsr_with(cp, mu, cfg)?;
            Ok(ComparisonRow {
                mu,
                all_private: ap.objective,
                full: full.solution.objective,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Comparison::from_rows(rows))
}

impl Comparison {
    pub fn from_rows(rows: Vec<ComparisonRow>) -> Comparison {
        let agree: Vec<usize> = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.gap().abs() <= AGREEMENT_TOL)
            .map(|(i, _)| i)
            .collect();
        let contiguous = agree.windows(2).all(|w| w[1] == w[0] + 1);
        let agreement = match (agree.first(), agree.last()) {
            (Some(&i), Some(&j)) => Some((rows[i].mu, rows[j].mu)),
            _ => None,
        };
        Comparison {
            rows,
            agreement,
            contiguous,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small() -> SearchConfig {
        SearchConfig {
            all_private_grid: 64,
            split_grid: 16,
            refine_rounds: 6,
        }
    }

    #[test]
    fn golden_section_finds_interior_and_boundary_maxima() {
        let (x, _) = golden_max(0.0, 2.0, |x| -(x - 0.7f64).powi(2));
        assert_abs_diff_eq!(x, 0.7, epsilon = 1e-8);
        let (x, _) = golden_max(0.0, 2.0, |x| x);
        assert_eq!(x, 2.0);
    }

    #[test]
    fn all_private_interference_free() {
        let cp = ChannelParams::new(0.0, 0.0, 1.5, 2.5, 1.0).unwrap();
        let sol = all_private_optimum_with(&cp, 1.0, &small()).unwrap();
        assert_eq!(sol.used_powers, (1.5, 2.5));
        assert_abs_diff_eq!(sol.rates.0, capacity(1.5), epsilon = 1e-15);
        assert_abs_diff_eq!(sol.rates.1, capacity(2.5), epsilon = 1e-15);
    }

    #[test]
    fn all_private_zero_weight_silences_user_two() {
        let cp = ChannelParams::new(0.4, 0.4, 2.0, 2.0, 1.0).unwrap();
        let sol = all_private_optimum_with(&cp, 0.0, &small()).unwrap();
        assert_eq!(sol.used_powers, (2.0, 0.0));
        assert_abs_diff_eq!(sol.rates.0, capacity(2.0), epsilon = 1e-15);
    }

    #[test]
    fn split_search_interference_free_is_all_private() {
        let cp = ChannelParams::new(0.0, 0.0, 1.0, 2.0, 1.0).unwrap();
        let opt = max_wsr_with(&cp, 1.0, &small()).unwrap();
        assert_eq!((opt.split.pv1, opt.split.pv2), (1.0, 2.0));
        assert_abs_diff_eq!(
            opt.solution.objective,
            capacity(1.0) + capacity(2.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn saturation_interference_free() {
        let cp = ChannelParams::new(0.0, 0.0, 1.0, 2.0, 1.0).unwrap();
        let sat = saturation_levels_with(&cp, 1.0, &small()).unwrap();
        assert_eq!((sat.p_hat_1, sat.p_hat_2), (1.0, 2.0));
        assert_eq!(sat.residual_public_power, 0.0);
        assert!(sat.verified);
    }

    #[test]
    fn mu_list_validation() {
        assert!(check_mu_list(&[]).is_err());
        assert!(check_mu_list(&[1.0, 1.0]).is_err());
        assert!(check_mu_list(&[-1.0, 1.0]).is_err());
        assert!(check_mu_list(&[0.0, 0.5, 2.0]).is_ok());
        let grid = default_mu_grid();
        assert_eq!(grid.len(), 33);
        assert_eq!(grid[0], 0.0625);
        assert_eq!(grid[16], 1.0);
        assert_eq!(grid[32], 16.0);
    }

    #[test]
    fn agreement_segment_summary() {
        let rows = vec![
            ComparisonRow {
                mu: 0.5,
                all_private: 1.0,
                full: 1.0,
            },
            ComparisonRow {
                mu: 1.0,
                all_private: 1.0,
                full: 1.0,
            },
            ComparisonRow {
                mu: 2.0,
                all_private: 1.0,
                full: 1.1,
            },
        ];
        let c = Comparison::from_rows(rows.clone());
        assert_eq!(c.agreement, Some((0.5, 1.0)));
        assert!(c.contiguous);
        let mut broken = rows;
        broken[1].full = 1.2;
        broken[2].full = 1.0;
        let c = Comparison::from_rows(broken);
        assert!(!c.contiguous);
    }

    #[test]
    fn resolution_matches_grid_and_rounds() {
        let cfg = SearchConfig::default();
        assert_abs_diff_eq!(cfg.resolution(), 1.0 / (63.0 * 256.0), epsilon = 1e-18);
    }
}
