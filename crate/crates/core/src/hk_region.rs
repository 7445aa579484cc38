//! The four-rate HK polytope over `(R_U1, R_V1, R_U2, R_V2)`.
//!
//! Fourteen rate constraints (seven per receiver) plus nonnegativity. The
//! weighted sum-rate LP is solved exactly by enumerating every basic
//! feasible point, which is cheap at this size (`C(18, 4) = 3060` bases).

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};
use crate::gaussian_mac::{build_overline_mac, dummy_message, dummy_rates, hk_ground, hk_mac};
use crate::model::{ChannelParams, Message, PowerSplit, RateVector, Receiver};
use crate::polymatroid::{DecodingOrder, Polymatroid, Subset, MEMBERSHIP_TOL};

/// Feasibility slack for candidate vertices.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Euclidean distance below which two vertices are the same point.
pub const DEDUP_TOL: f64 = 1e-8;
/// A halfspace is reported tight when its slack is below this.
pub const TIGHT_TOL: f64 = 1e-9;
/// Objective values this close are treated as ties.
pub const OBJECTIVE_TIE_TOL: f64 = 1e-12;
/// Pivot magnitude below which a basis is singular.
const PIVOT_TOL: f64 = 1e-12;
/// Reconstruction tolerance for time-sharing.
pub const TIME_SHARING_TOL: f64 = 1e-8;
/// Residual above which the sliced four-input region disagrees with the
/// polytope.
pub const SLICE_TOL: f64 = 1e-9;

pub type Point = [f64; 4];

/// `coeffs · r <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub name: String,
    pub coeffs: Point,
    pub rhs: f64,
    /// Receiver whose region produced the row; `None` for nonnegativity.
    pub receiver: Option<Receiver>,
    /// Messages the row sums over (message-index mask).
    pub messages: Subset,
}

impl Halfspace {
    pub fn value(&self, r: &Point) -> f64 {
        dot(&self.coeffs, r)
    }

    pub fn slack(&self, r: &Point) -> f64 {
        self.rhs - self.value(r)
    }

    /// The receiver's three-message sum constraint.
    pub fn is_sum_constraint(&self) -> bool {
        self.receiver.is_some() && self.messages.len() == 3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePolytope {
    pub halfspaces: Vec<Halfspace>,
}

impl RatePolytope {
    pub fn contains(&self, r: &Point) -> bool {
        self.halfspaces
            .iter()
            .all(|h| h.slack(r) >= -FEASIBILITY_TOL)
    }

    pub fn tight(&self, r: &Point) -> Vec<String> {
        self.halfspaces
            .iter()
            .filter(|h| h.slack(r).abs() <= TIGHT_TOL)
            .map(|h| h.name.clone())
            .collect()
    }

    pub fn find(&self, name: &str) -> Option<&Halfspace> {
        self.halfspaces.iter().find(|h| h.name == name)
    }

    /// Copy without the named rows.
    pub fn without(&self, names: &[&str]) -> RatePolytope {
        RatePolytope {
            halfspaces: self
                .halfspaces
                .iter()
                .filter(|h| !names.contains(&h.name.as_str()))
                .cloned()
                .collect(),
        }
    }

    fn rows(&self) -> Vec<Point> {
        self.halfspaces.iter().map(|h| h.coeffs).collect()
    }
}

fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Constraint names and message sets per receiver, in constraint order.
fn hk_rows(receiver: Receiver) -> [(&'static str, &'static [Message]); 7] {
    use Message::*;
    match receiver {
        Receiver::Y1 => [
            ("HK1p", &[U1]),
            ("HK2p", &[U2]),
            ("HK3p", &[V1]),
            ("HK4p", &[U1, U2]),
            ("HK5p", &[U1, V1]),
            ("HK6p", &[U2, V1]),
            ("HK7p", &[U1, U2, V1]),
        ],
        Receiver::Y2 => [
            ("HK8p", &[U1]),
            ("HK9p", &[U2]),
            ("HK10p", &[V2]),
            ("HK11p", &[U1, U2]),
            ("HK12p", &[U2, V2]),
            ("HK13p", &[U1, V2]),
            ("HK14p", &[U1, U2, V2]),
        ],
    }
}

/// Name of the receiver's three-message sum constraint.
pub fn sum_constraint_name(receiver: Receiver) -> &'static str {
    match receiver {
        Receiver::Y1 => "HK7p",
        Receiver::Y2 => "HK14p",
    }
}

/// Builds the HK polytope by evaluating `rank` (a polymatroid over
/// `hk_ground(receiver)`) on each constraint's message set.
fn polytope_from_ranks<F>(rank: F) -> RatePolytope
where
    F: Fn(Receiver, Subset) -> f64,
{
    let mut halfspaces = Vec::with_capacity(18);
    for receiver in Receiver::BOTH {
        let ground = hk_ground(receiver);
        for (name, messages) in hk_rows(receiver) {
            let mut coeffs = [0.0; 4];
            let mut local = Subset::EMPTY;
            for m in messages {
                coeffs[m.index()] = 1.0;
                let k = ground
                    .iter()
                    .position(|g| g == m)
                    .expect("message in ground set");
                local = local.with(k);
            }
            halfspaces.push(Halfspace {
                name: name.to_string(),
                coeffs,
                rhs: rank(receiver, local),
                receiver: Some(receiver),
                messages: Subset::from_indices(messages.iter().map(|m| m.index())),
            });
        }
    }
    for m in Message::ALL {
        let mut coeffs = [0.0; 4];
        coeffs[m.index()] = -1.0;
        halfspaces.push(Halfspace {
            name: format!("R_{m}>=0"),
            coeffs,
            rhs: 0.0,
            receiver: None,
            messages: Subset::singleton(m.index()),
        });
    }
    RatePolytope { halfspaces }
}

/// The 18-row HK polytope for a fixed power split.
pub fn build_polytope(cp: &ChannelParams, ps: &PowerSplit) -> RatePolytope {
    let y1 = hk_mac(cp, ps, Receiver::Y1);
    let y2 = hk_mac(cp, ps, Receiver::Y2);
    polytope_from_ranks(|rx, s| match rx {
        Receiver::Y1 => y1.rank(s),
        Receiver::Y2 => y2.rank(s),
    })
}

/// Precomputed inverses of every nonsingular 4-row basis of a fixed
/// coefficient matrix; vertices for any right-hand side follow by one
/// matrix-vector product per basis.
#[derive(Debug, Clone)]
pub struct VertexEnumerator {
    rows: Vec<Point>,
    bases: Vec<([usize; 4], [Point; 4])>,
}

impl VertexEnumerator {
    pub fn new(rows: &[Point]) -> Self {
        let n = rows.len();
        let mut bases = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let basis = [i, j, k, l];
                        let m = [rows[i], rows[j], rows[k], rows[l]];
                        if let Some(inv) = invert4(&m) {
                            bases.push((basis, inv));
                        }
                    }
                }
            }
        }
        VertexEnumerator {
            rows: rows.to_vec(),
            bases,
        }
    }

    pub fn rows(&self) -> &[Point] {
        &self.rows
    }

    pub fn basis_count(&self) -> usize {
        self.bases.len()
    }

    /// Basic feasible points for the given right-hand sides, deduplicated,
    /// in basis order.
    pub fn vertices(&self, rhs: &[f64]) -> Vec<Point> {
        debug_assert_eq!(rhs.len(), self.rows.len());
        let mut out: Vec<Point> = Vec::new();
        for (basis, inv) in &self.bases {
            let b = [rhs[basis[0]], rhs[basis[1]], rhs[basis[2]], rhs[basis[3]]];
            let x = [
                dot(&inv[0], &b),
                dot(&inv[1], &b),
                dot(&inv[2], &b),
                dot(&inv[3], &b),
            ];
            let feasible = self
                .rows
                .iter()
                .zip(rhs)
                .all(|(row, r)| dot(row, &x) <= r + FEASIBILITY_TOL);
            if !feasible {
                continue;
            }
            let duplicate = out.iter().any(|v| {
                let d2: f64 = (0..4).map(|t| (v[t] - x[t]).powi(2)).sum();
                d2.sqrt() <= DEDUP_TOL
            });
            if !duplicate {
                out.push(x);
            }
        }
        out
    }
}

/// Gauss-Jordan inverse with partial pivoting; `None` when singular.
fn invert4(m: &[Point; 4]) -> Option<[Point; 4]> {
    let mut a = *m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < PIVOT_TOL {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for t in 0..4 {
            a[col][t] /= p;
            inv[col][t] /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for t in 0..4 {
                        a[r][t] -= f * a[col][t];
                        inv[r][t] -= f * inv[col][t];
                    }
                }
            }
        }
    }
    Some(inv)
}

static HK_ENUMERATOR: Lazy<VertexEnumerator> = Lazy::new(|| {
    let template = polytope_from_ranks(|_, _| 0.0);
    VertexEnumerator::new(&template.rows())
});

fn enumerate_points(rp: &RatePolytope) -> Vec<Point> {
    let rows = rp.rows();
    let rhs: Vec<f64> = rp.halfspaces.iter().map(|h| h.rhs).collect();
    if rows == HK_ENUMERATOR.rows() {
        HK_ENUMERATOR.vertices(&rhs)
    } else {
        VertexEnumerator::new(&rows).vertices(&rhs)
    }
}

/// All vertices of the polytope (basic feasible points).
pub fn enumerate_vertices(rp: &RatePolytope) -> Result<Vec<RateVector>> {
    if rp.halfspaces.len() > 24 {
        return Err(GicError::InvalidArgument(format!(
            "{} halfspaces exceed the enumeration limit of 24",
            rp.halfspaces.len()
        )));
    }
    enumerate_points(rp)
        .into_iter()
        .map(RateVector::messages)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominant {
    Y1,
    Y2,
    Both,
    /// No sum constraint binds; possible at splits that are not optimal.
    Neither,
}

impl Dominant {
    /// Receiver used when a single one is needed; ties go to `Y1`.
    pub fn primary(self) -> Option<Receiver> {
        match self {
            Dominant::Y1 | Dominant::Both => Some(Receiver::Y1),
            Dominant::Y2 => Some(Receiver::Y2),
            Dominant::Neither => None,
        }
    }

    pub fn is_facet(self) -> bool {
        self != Dominant::Neither
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dominant::Y1 => "Y1",
            Dominant::Y2 => "Y2",
            Dominant::Both => "both",
            Dominant::Neither => "neither",
        }
    }
}

/// Optimum of `R_U1 + R_V1 + mu (R_U2 + R_V2)` over one polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsrSolution {
    pub mu: f64,
    pub rates: RateVector,
    pub objective: f64,
    pub tight: Vec<String>,
    pub dominant: Dominant,
}

impl WsrSolution {
    pub fn rate(&self, m: Message) -> f64 {
        self.rates.rates()[m.index()]
    }

    pub fn point(&self) -> Point {
        let r = self.rates.rates();
        [r[0], r[1], r[2], r[3]]
    }

    /// `(R1, R2)` per user.
    pub fn user_rates(&self) -> (f64, f64) {
        let r = self.rates.rates();
        (r[0] + r[1], r[2] + r[3])
    }
}

pub fn weighted_objective(r: &Point, mu: f64) -> f64 {
    r[0] + r[1] + mu * (r[2] + r[3])
}

/// Best objective only; skips building the solution record.
pub fn max_wsr_value(rp: &RatePolytope, mu: f64) -> f64 {
    enumerate_points(rp)
        .iter()
        .map(|v| weighted_objective(v, mu))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact LP optimum by vertex enumeration.
///
/// Among vertices within [`OBJECTIVE_TIE_TOL`] of the best objective the one
/// with the most active sum constraints wins, then the larger total rate,
/// then enumeration order.
pub fn max_wsr_over_polytope(rp: &RatePolytope, mu: f64) -> Result<WsrSolution> {
    if !(mu >= 0.0) {
        return Err(GicError::InvalidArgument(format!("mu = {mu} must be >= 0")));
    }
    let vertices = enumerate_points(rp);
    let best = vertices
        .iter()
        .map(|v| weighted_objective(v, mu))
        .fold(f64::NEG_INFINITY, f64::max);
    let sum_rows: Vec<&Halfspace> = rp
        .halfspaces
        .iter()
        .filter(|h| h.is_sum_constraint())
        .collect();
    let active_sums = |v: &Point| {
        sum_rows
            .iter()
            .filter(|h| h.slack(v).abs() <= TIGHT_TOL)
            .count()
    };
    let mut chosen: Option<(&Point, usize, f64)> = None;
    for v in vertices
        .iter()
        .filter(|v| weighted_objective(v, mu) >= best - OBJECTIVE_TIE_TOL)
    {
        let key = (active_sums(v), v.iter().sum::<f64>());
        let better = match chosen {
            None => true,
            Some((_, n, total)) => key.0 > n || (key.0 == n && key.1 > total + OBJECTIVE_TIE_TOL),
        };
        if better {
            chosen = Some((v, key.0, key.1));
        }
    }
    let (point, _, _) =
        chosen.ok_or_else(|| GicError::InvalidArgument("polytope has no vertices".to_string()))?;
    let rates = RateVector::messages(*point)?;
    let clamped = {
        let r = rates.rates();
        [r[0], r[1], r[2], r[3]]
    };
    let tight = rp.tight(point);
    let active = |rx: Receiver| {
        rp.halfspaces.iter().any(|h| {
            h.receiver == Some(rx) && h.is_sum_constraint() && h.slack(point).abs() <= TIGHT_TOL
        })
    };
    let dominant = match (active(Receiver::Y1), active(Receiver::Y2)) {
        (true, true) => Dominant::Both,
        (true, false) => Dominant::Y1,
        (false, true) => Dominant::Y2,
        (false, false) => Dominant::Neither,
    };
    Ok(WsrSolution {
        mu,
        objective: weighted_objective(&clamped, mu),
        rates,
        tight,
        dominant,
    })
}

/// Per-constraint comparison between the sliced four-input regions and the
/// HK polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub dummy_v2_at_y1: f64,
    pub dummy_v1_at_y2: f64,
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    /// Polytope whose right-hand sides come from the slices.
    pub slice_polytope: RatePolytope,
}

/// Slices each four-input region at its dummy rate and compares the result
/// with the HK polytope constraint by constraint.
pub fn p0_slice_check(cp: &ChannelParams, ps: &PowerSplit) -> Result<SliceReport> {
    let (d1, d2) = dummy_rates(cp, ps);
    let slice = |rx: Receiver, rate: f64| -> Polymatroid {
        build_overline_mac(cp, ps, rx).slice(dummy_message(rx).index(), rate)
    };
    let y1 = slice(Receiver::Y1, d1);
    let y2 = slice(Receiver::Y2, d2);
    for (rx, p) in [(Receiver::Y1, &y1), (Receiver::Y2, &y2)] {
        let expected: Vec<&str> = hk_ground(rx).iter().map(|m| m.label()).collect();
        debug_assert_eq!(p.labels(), expected.as_slice());
    }
    let slice_polytope = polytope_from_ranks(|rx, s| match rx {
        Receiver::Y1 => y1.rank(s),
        Receiver::Y2 => y2.rank(s),
    });
    let hk = build_polytope(cp, ps);
    let mut residuals = Vec::with_capacity(14);
    let mut max_residual: f64 = 0.0;
    for (h, s) in hk.halfspaces.iter().zip(&slice_polytope.halfspaces) {
        if h.receiver.is_none() {
            continue;
        }
        let r = (h.rhs - s.rhs).abs();
        max_residual = max_residual.max(r);
        residuals.push((h.name.clone(), r));
    }
    if let Some((name, r)) = residuals.iter().find(|(_, r)| *r > SLICE_TOL) {
        return Err(GicError::SliceMismatch {
            constraint: name.clone(),
            residual: *r,
        });
    }
    Ok(SliceReport {
        dummy_v2_at_y1: d1,
        dummy_v1_at_y2: d2,
        residuals,
        max_residual,
        slice_polytope,
    })
}

/// A facet point written as `lambda * A + (1 - lambda) * B` for two corner
/// points of one receiver's three-message region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSharing {
    pub receiver: Receiver,
    pub corner_a: RateVector,
    pub order_a: DecodingOrder,
    pub corner_b: RateVector,
    pub order_b: DecodingOrder,
    pub lambda: f64,
}

impl TimeSharing {
    pub fn reconstruct(&self) -> Vec<f64> {
        self.corner_a
            .rates()
            .iter()
            .zip(self.corner_b.rates())
            .map(|(a, b)| self.lambda * a + (1.0 - self.lambda) * b)
            .collect()
    }
}

/// Splits the optimum into two corner points of the dominant receiver's
/// region. When both sum constraints bind, `Y1` is tried first and `Y2` as a
/// fallback.
pub fn time_sharing_decomposition(
    cp: &ChannelParams,
    ps: &PowerSplit,
    sol: &WsrSolution,
) -> Result<TimeSharing> {
    let first = sol.dominant.primary().ok_or_else(|| GicError::NotOnFacet {
        receiver: "either receiver".to_string(),
        gap: sum_gap(cp, ps, sol),
    })?;
    match decompose_at(cp, ps, sol, first) {
        Err(GicError::NoCornerPair) if sol.dominant == Dominant::Both => {
            decompose_at(cp, ps, sol, first.other())
        }
        other => other,
    }
}

fn decompose_at(
    cp: &ChannelParams,
    ps: &PowerSplit,
    sol: &WsrSolution,
    receiver: Receiver,
) -> Result<TimeSharing> {
    let region = hk_mac(cp, ps, receiver);
    let x: Vec<f64> = hk_ground(receiver).iter().map(|m| sol.rate(*m)).collect();
    let gap = (x.iter().sum::<f64>() - region.sum_rate()).abs();
    if gap > MEMBERSHIP_TOL {
        return Err(GicError::NotOnFacet {
            receiver: receiver.to_string(),
            gap,
        });
    }
    let mut corners: Vec<(DecodingOrder, Vec<f64>)> = Vec::new();
    for order in DecodingOrder::all(region.m()) {
        let c = region.corner_rates(&order)?;
        if !corners.iter().any(|(_, d)| max_abs_diff(d, &c) <= 1e-12) {
            corners.push((order, c));
        }
    }
    let labels = region.labels().to_vec();
    let build = |a: &(DecodingOrder, Vec<f64>), b: &(DecodingOrder, Vec<f64>), lambda: f64| {
        Ok(TimeSharing {
            receiver,
            corner_a: RateVector::from_solver(labels.clone(), a.1.clone())?,
            order_a: a.0.clone(),
            corner_b: RateVector::from_solver(labels.clone(), b.1.clone())?,
            order_b: b.0.clone(),
            lambda,
        })
    };
    if let Some(c) = corners
        .iter()
        .find(|(_, c)| max_abs_diff(c, &x) <= TIME_SHARING_TOL)
    {
        return build(c, c, 1.0);
    }
    for i in 0..corners.len() {
        for j in i + 1..corners.len() {
            let (a, b) = (&corners[i].1, &corners[j].1);
            let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
            let norm2: f64 = d.iter().map(|t| t * t).sum();
            if norm2 == 0.0 {
                continue;
            }
            let lambda = x
                .iter()
                .zip(b)
                .zip(&d)
                .map(|((xi, bi), di)| (xi - bi) * di)
                .sum::<f64>()
                / norm2;
            if !(-1e-12..=1.0 + 1e-12).contains(&lambda) {
                continue;
            }
            let lambda = lambda.clamp(0.0, 1.0);
            let recon: Vec<f64> = a
                .iter()
                .zip(b)
                .map(|(p, q)| lambda * p + (1.0 - lambda) * q)
                .collect();
            if max_abs_diff(&recon, &x) <= TIME_SHARING_TOL {
                return build(&corners[i], &corners[j], lambda);
            }
        }
    }
    Err(GicError::NoCornerPair)
}

/// Smallest distance of the solution to either receiver's sum-rate facet.
fn sum_gap(cp: &ChannelParams, ps: &PowerSplit, sol: &WsrSolution) -> f64 {
    Receiver::BOTH
        .iter()
        .map(|&rx| {
            let total: f64 = hk_ground(rx).iter().map(|m| sol.rate(*m)).sum();
            (hk_mac(cp, ps, rx).sum_rate() - total).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}
