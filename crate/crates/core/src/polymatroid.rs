//! Polymatroids over small ground sets.
//!
//! A rank function is tabulated over all `2^m` subset bitmasks, so every query
//! is a lookup. Corner points, the greedy weighted-sum maximizer and the
//! projection/restriction/slice constructions all work on that table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GicError, Result};
use crate::model::RateVector;

/// Largest ground set accepted; exhaustive checks stay cheap below this.
pub const MAX_GROUND: usize = 12;

/// Tolerance of the axiom checks (normalization, monotonicity, submodularity).
pub const AXIOM_TOL: f64 = 1e-12;

/// Absolute tolerance on rate sums for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A subset of the ground set as a bitmask.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(m: usize) -> Subset {
        Subset(((1u64 << m) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Subset {
        Subset(items.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | (1 << i))
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Element indices in ascending order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Successive-decoding order, listed from the bottom of the stack (decoded
/// last) to the top (decoded first).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecodingOrder(Vec<usize>);

impl DecodingOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut seen = vec![false; m];
        for &i in &order {
            if i >= m || seen[i] {
                return Err(GicError::InvalidOrder(format!(
                    "{order:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(DecodingOrder(order))
    }

    pub fn identity(m: usize) -> Self {
        DecodingOrder((0..m).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every order of `m` elements, in lexicographic order.
    pub fn all(m: usize) -> Vec<DecodingOrder> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(m);
        let mut used = vec![false; m];
        permute(m, &mut current, &mut used, &mut out);
        out
    }
}

fn permute(m: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<DecodingOrder>) {
    if current.len() == m {
        out.push(DecodingOrder(current.clone()));
        return;
    }
    for i in 0..m {
        if !used[i] {
            used[i] = true;
            current.push(i);
            permute(m, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}

/// Tabulated set function over a labelled ground set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polymatroid {
    labels: Vec<String>,
    ranks: Vec<f64>,
}

/// Outcome of [`Polymatroid::membership`].
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub feasible: bool,
    pub violated: Vec<Subset>,
}

/// Outcome of the exhaustive axiom check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AxiomReport {
    pub normalization_gap: f64,
    /// Worst `f(S) - f(S + i)`, positive when monotonicity fails.
    pub monotonicity_gap: f64,
    /// Worst `f(S+i+j) + f(S) - f(S+i) - f(S+j)`, positive when submodularity
    /// fails.
    pub submodularity_gap: f64,
}

impl AxiomReport {
    pub fn normalized(&self) -> bool {
        self.normalization_gap <= AXIOM_TOL
    }

    pub fn monotone(&self) -> bool {
        self.monotonicity_gap <= AXIOM_TOL
    }

    pub fn submodular(&self) -> bool {
        self.submodularity_gap <= AXIOM_TOL
    }

    pub fn is_valid(&self) -> bool {
        self.normalized() && self.monotone() && self.submodular()
    }
}

/// A cut through a polymatroid at a fixed rate of one axis message.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    /// Position of the axis message in the decoding stack (0 = bottom).
    pub position: usize,
    /// Rate of the axis message at this cut.
    pub axis_rate: f64,
    /// Region of the remaining messages at that axis rate.
    pub child: Polymatroid,
}

impl Polymatroid {
    /// Tabulates `rank` over every subset of `labels`. No axiom is checked.
    pub fn from_fn<F>(labels: Vec<String>, rank: F) -> Result<Self>
    where
        F: Fn(Subset) -> f64,
    {
        let m = labels.len();
        if m > MAX_GROUND {
            return Err(GicError::TooLarge(m));
        }
        let ranks = (0..1u32 << m).map(|mask| rank(Subset(mask))).collect();
        Ok(Polymatroid { labels, ranks })
    }

    /// Ground set labelled `0..m`.
    pub fn from_fn_indexed<F>(m: usize, rank: F) -> Result<Self>
    where
        F: Fn(Subset) -> f64,
    {
        Self::from_fn((0..m).map(|i| i.to_string()).collect(), rank)
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ground(&self) -> Subset {
        Subset::full(self.m())
    }

    pub fn rank(&self, s: Subset) -> f64 {
        self.ranks[s.index()]
    }

    /// `f(ground)`: the sum-rate facet level.
    pub fn sum_rate(&self) -> f64 {
        self.rank(self.ground())
    }

    pub fn position_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Subset of this ground set with the given labels.
    pub fn subset_of_labels<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        labels: I,
    ) -> Option<Subset> {
        let mut s = Subset::EMPTY;
        for l in labels {
            s = s.with(self.position_of(l)?);
        }
        Some(s)
    }

    pub fn membership(&self, r: &RateVector) -> Result<Membership> {
        self.membership_slice(r.rates())
    }

    /// Membership for a raw rate slice in ground-set order.
    pub fn membership_slice(&self, r: &[f64]) -> Result<Membership> {
        if r.len() != self.m() {
            return Err(GicError::DimensionMismatch {
                expected: self.m(),
                got: r.len(),
            });
        }
        let violated: Vec<Subset> = (1..self.ranks.len() as u32)
            .map(Subset)
            .filter(|s| {
                let sum: f64 = s.elements().map(|i| r[i]).sum();
                sum > self.rank(*s) + MEMBERSHIP_TOL
            })
            .collect();
        Ok(Membership {
            feasible: violated.is_empty(),
            violated,
        })
    }

    pub fn contains(&self, r: &[f64]) -> bool {
        self.membership_slice(r)
            .map(|m| m.feasible)
            .unwrap_or(false)
    }

    /// Exhaustive check of normalization, monotonicity and submodularity.
    pub fn check_axioms(&self) -> AxiomReport {
        let m = self.m();
        let mut report = AxiomReport {
            normalization_gap: self.rank(Subset::EMPTY).abs(),
            ..Default::default()
        };
        for mask in 0..self.ranks.len() as u32 {
            let s = Subset(mask);
            let fs = self.rank(s);
            for i in (0..m).filter(|&i| !s.contains(i)) {
                let fsi = self.rank(s.with(i));
                report.monotonicity_gap = report.monotonicity_gap.max(fs - fsi);
                for j in (i + 1..m).filter(|&j| !s.contains(j)) {
                    let gap = self.rank(s.with(i).with(j)) + fs - fsi - self.rank(s.with(j));
                    report.submodularity_gap = report.submodularity_gap.max(gap);
                }
            }
        }
        report
    }

    /// Vertex of the sum-rate facet reached by successive decoding in `order`.
    pub fn corner_point(&self, order: &DecodingOrder) -> Result<RateVector> {
        RateVector::from_solver(self.labels.clone(), self.corner_rates(order)?)
    }

    /// Raw corner-point rates in ground-set order.
    pub fn corner_rates(&self, order: &DecodingOrder) -> Result<Vec<f64>> {
        if order.len() != self.m() {
            return Err(GicError::DimensionMismatch {
                expected: self.m(),
                got: order.len(),
            });
        }
        let mut rates = vec![0.0; self.m()];
        let mut below = Subset::EMPTY;
        for &i in order.as_slice() {
            let next = below.with(i);
            rates[i] = self.rank(next) - self.rank(below);
            below = next;
        }
        Ok(rates)
    }

    /// Greedy maximizer of `w · r`: the largest weight sits at the bottom of
    /// the stack. Ties keep ascending message index.
    pub fn max_weighted_sum(&self, weights: &[f64]) -> Result<(RateVector, DecodingOrder)> {
        if weights.len() != self.m() {
            return Err(GicError::DimensionMismatch {
                expected: self.m(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(GicError::InvalidArgument(format!("negative weight {w}")));
        }
        let mut order: Vec<usize> = (0..self.m()).collect();
        order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]));
        let order = DecodingOrder(order);
        Ok((self.corner_point(&order)?, order))
    }

    /// Region of the messages outside `bottom` when `bottom` is decoded last
    /// and therefore acts as noise: `f(S ∪ B) - f(B)`.
    pub fn project_above(&self, bottom: Subset) -> Polymatroid {
        let rest = self.ground().minus(bottom);
        let base = self.rank(bottom);
        self.induced(rest, |s| self.rank(s.union(bottom)) - base)
    }

    /// Region of the messages in `bottom` once everything above them has been
    /// decoded and removed.
    pub fn restrict_below(&self, bottom: Subset) -> Polymatroid {
        self.induced(bottom, |s| self.rank(s))
    }

    /// Region of the other messages when `axis` carries `axis_rate`:
    /// `g(S) = min(f(S), f(S + axis) - axis_rate)`.
    pub fn slice(&self, axis: usize, axis_rate: f64) -> Polymatroid {
        let rest = self.ground().minus(Subset::singleton(axis));
        self.induced(rest, |s| {
            self.rank(s).min(self.rank(s.with(axis)) - axis_rate)
        })
    }

    /// One cut per stack position of `axis`, the other messages in ascending
    /// index order around it. Cut 0 has the axis at the bottom (largest axis
    /// rate, smallest child); the children grow as the axis moves up.
    pub fn nested_cuts(&self, axis: usize) -> Result<Vec<Cut>> {
        let m = self.m();
        if m < 2 || axis >= m {
            return Err(GicError::InvalidArgument(format!(
                "nested cuts need m >= 2 and axis < m (m = {m}, axis = {axis})"
            )));
        }
        let others: Vec<usize> = (0..m).filter(|&i| i != axis).collect();
        (0..m)
            .map(|position| {
                let mut order = others.clone();
                order.insert(position, axis);
                let rates = self.corner_rates(&DecodingOrder(order))?;
                let axis_rate = rates[axis];
                Ok(Cut {
                    position,
                    axis_rate,
                    child: self.slice(axis, axis_rate),
                })
            })
            .collect()
    }

    /// Polymatroid over the elements of `keep` (relabelled compactly, in
    /// ascending order) with rank given on parent-index subsets.
    fn induced<F: Fn(Subset) -> f64>(&self, keep: Subset, rank: F) -> Polymatroid {
        let kept: Vec<usize> = keep.elements().collect();
        let labels = kept.iter().map(|&i| self.labels[i].clone()).collect();
        let ranks = (0..1u32 << kept.len())
            .map(|mask| {
                let parent = Subset::from_indices(Subset(mask).elements().map(|k| kept[k]));
                rank(parent)
            })
            .collect();
        Polymatroid { labels, ranks }
    }

    /// Lifts a subset of `child` (which must share labels with `self`) into
    /// this ground set.
    pub fn lift_subset(&self, child: &Polymatroid, s: Subset) -> Option<Subset> {
        let mut out = Subset::EMPTY;
        for k in s.elements() {
            out = out.with(self.position_of(&child.labels[k])?);
        }
        Some(out)
    }

    /// Adds a constant perturbation to a single subset's rank. Used to inject
    /// faults when exercising the validation suite.
    pub fn perturbed(&self, s: Subset, delta: f64) -> Polymatroid {
        let mut out = self.clone();
        out.ranks[s.index()] += delta;
        out
    }
}

/// Exhaustive axiom check: `true` iff normalization, monotonicity and
/// submodularity hold within [`AXIOM_TOL`].
pub fn validate_polymatroid(p: &Polymatroid) -> Result<bool> {
    if p.m() > MAX_GROUND {
        return Err(GicError::TooLarge(p.m()));
    }
    Ok(p.check_axioms().is_valid())
}

/// Linear power constraints `coeffs · p <= rhs` over an `m`-dimensional
/// nonnegative power vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerVectorSimplex {
    pub dim: usize,
    pub rows: Vec<(Vec<f64>, f64)>,
}

impl PowerVectorSimplex {
    pub fn new(dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (coeffs, rhs) in &rows {
            if coeffs.len() != dim {
                return Err(GicError::DimensionMismatch {
                    expected: dim,
                    got: coeffs.len(),
                });
            }
            if coeffs.iter().any(|c| !(*c >= 0.0)) || !(*rhs >= 0.0) {
                return Err(GicError::InvalidArgument(
                    "simplex rows need nonnegative coefficients and right-hand sides".into(),
                ));
            }
        }
        let pvs = PowerVectorSimplex { dim, rows };
        if !pvs.is_bounded() {
            return Err(GicError::InvalidArgument(
                "every coordinate must appear with a positive coefficient".into(),
            ));
        }
        Ok(pvs)
    }

    /// Per-user budget simplex over `(pu1, pv1, pu2, pv2)`.
    pub fn budgets(p1: f64, p2: f64) -> Result<Self> {
        Self::new(
            4,
            vec![
                (vec![1.0, 1.0, 0.0, 0.0], p1),
                (vec![0.0, 0.0, 1.0, 1.0], p2),
            ],
        )
    }

    pub fn is_bounded(&self) -> bool {
        (0..self.dim).all(|k| self.rows.iter().any(|(c, _)| c[k] > 0.0))
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim
            && p.iter().all(|x| *x >= 0.0)
            && self.rows.iter().all(|(c, rhs)| {
                let lhs: f64 = c.iter().zip(p).map(|(a, b)| a * b).sum();
                lhs <= rhs + MEMBERSHIP_TOL
            })
    }

    /// `true` when both simplices share coefficient rows and every
    /// right-hand side of `self` is at most the matching one of `other`.
    pub fn is_nested_in(&self, other: &PowerVectorSimplex) -> bool {
        self.dim == other.dim
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|((c1, r1), (c2, r2))| c1 == c2 && r1 <= r2)
    }

    /// Grid maximizer of `objective` over the simplex with `steps` intervals
    /// per coordinate. Returns `None` if no grid point is feasible.
    pub fn maximize_on_grid<F>(&self, steps: usize, objective: F) -> Option<(Vec<f64>, f64)>
    where
        F: Fn(&[f64]) -> f64,
    {
        let upper: Vec<f64> = (0..self.dim)
            .map(|k| {
                self.rows
                    .iter()
                    .filter(|(c, _)| c[k] > 0.0)
                    .map(|(c, rhs)| rhs / c[k])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let steps = steps.max(1);
        let total = (steps + 1).pow(self.dim as u32);
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut point = vec![0.0; self.dim];
        for mut code in 0..total {
            for k in 0..self.dim {
                point[k] = upper[k] * (code % (steps + 1)) as f64 / steps as f64;
                code /= steps + 1;
            }
            if !self.contains(&point) {
                continue;
            }
            let value = objective(&point);
            if best.as_ref().is_none_or(|(_, v)| value > *v) {
                best = Some((point.clone(), value));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gaussian(powers: &[f64], noise: f64) -> Polymatroid {
        let powers = powers.to_vec();
        Polymatroid::from_fn_indexed(powers.len(), move |s| {
            let p: f64 = s.elements().map(|i| powers[i]).sum();
            0.5 * (1.0 + p / noise).log2()
        })
        .unwrap()
    }

    fn table(m: usize, values: &[(u32, f64)]) -> Polymatroid {
        let map: std::collections::HashMap<u32, f64> = values.iter().copied().collect();
        Polymatroid::from_fn_indexed(m, |s| map.get(&s.0).copied().unwrap_or(0.0)).unwrap()
    }

    #[test]
    fn membership_of_zero_vector() {
        let p = gaussian(&[1.0, 2.0, 0.5], 1.0);
        assert!(p.membership_slice(&[0.0; 3]).unwrap().feasible);
    }

    #[test]
    fn membership_reports_violated_subsets() {
        let p = table(2, &[(0b01, 0.5), (0b10, 0.5), (0b11, 1.0)]);
        assert!(p.membership_slice(&[0.5, 0.5]).unwrap().feasible);
        let m = p.membership_slice(&[0.6, 0.5]).unwrap();
        assert!(!m.feasible);
        assert_eq!(m.violated, vec![Subset(0b01), Subset(0b11)]);
    }

    #[test]
    fn membership_dimension_mismatch() {
        let p = gaussian(&[1.0, 1.0], 1.0);
        assert!(matches!(
            p.membership_slice(&[0.0]),
            Err(GicError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn axioms_on_classic_set_functions() {
        let square = Polymatroid::from_fn_indexed(2, |s| (s.len() * s.len()) as f64).unwrap();
        assert!(!validate_polymatroid(&square).unwrap());
        assert!(square.check_axioms().monotone());
        assert!(!square.check_axioms().submodular());

        let uniform = Polymatroid::from_fn_indexed(5, |s| s.len().min(1) as f64).unwrap();
        assert!(validate_polymatroid(&uniform).unwrap());
    }

    #[test]
    fn too_large_ground_set() {
        let labels: Vec<String> = (0..13).map(|i| i.to_string()).collect();
        assert!(matches!(
            Polymatroid::from_fn(labels, |_| 0.0),
            Err(GicError::TooLarge(13))
        ));
    }

    #[test]
    fn corner_point_two_user_gaussian() {
        let p = gaussian(&[1.0, 2.0], 1.0);
        // message 0 at the bottom (decoded last), message 1 on top
        let r = p
            .corner_rates(&DecodingOrder::new(vec![0, 1]).unwrap())
            .unwrap();
        assert_abs_diff_eq!(r[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 0.5, epsilon = 1e-15);
        let other = p
            .corner_rates(&DecodingOrder::new(vec![1, 0]).unwrap())
            .unwrap();
        assert_abs_diff_eq!(other.iter().sum::<f64>(), p.sum_rate(), epsilon = 1e-15);
    }

    #[test]
    fn modular_rank_corners_collapse() {
        let c = [0.3, 1.1, 0.7];
        let p = Polymatroid::from_fn_indexed(3, |s| s.elements().map(|i| c[i]).sum()).unwrap();
        for order in DecodingOrder::all(3) {
            let r = p.corner_rates(&order).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(r[i], c[i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn greedy_matches_enumeration_example() {
        let p = gaussian(&[1.0, 2.0], 1.0);
        let (r, order) = p.max_weighted_sum(&[1.0, 2.0]).unwrap();
        assert_eq!(order.as_slice(), &[1, 0]);
        // oracle: evaluate both orders directly
        let best = DecodingOrder::all(2)
            .iter()
            .map(|o| {
                let x = p.corner_rates(o).unwrap();
                x[0] + 2.0 * x[1]
            })
            .fold(f64::MIN, f64::max);
        let obj = r.rates()[0] + 2.0 * r.rates()[1];
        assert_abs_diff_eq!(obj, best, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rates()[0], 0.20751874963942185, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rates()[1], 0.7924812503605781, epsilon = 1e-12);
        assert_abs_diff_eq!(obj, 1.792481250360578, epsilon = 1e-12);
    }

    #[test]
    fn greedy_edge_weights() {
        let p = gaussian(&[1.0, 2.0], 1.0);
        let (r, order) = p.max_weighted_sum(&[1.0, 1.0]).unwrap();
        assert_eq!(order.as_slice(), &[0, 1]);
        assert_abs_diff_eq!(r.total(), p.sum_rate(), epsilon = 1e-15);
        let (r, _) = p.max_weighted_sum(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(r.rates()[0], p.rank(Subset(0b01)), epsilon = 1e-15);
        assert!(p.max_weighted_sum(&[-1.0, 0.0]).is_err());
    }

    #[test]
    fn projection_and_restriction_examples() {
        let p = gaussian(&[1.0, 2.0], 1.0);
        assert_eq!(p.project_above(Subset::EMPTY), p);
        let above = p.project_above(Subset::singleton(0));
        assert_eq!(above.labels(), &["1".to_string()]);
        assert_abs_diff_eq!(above.rank(Subset(1)), 0.5, epsilon = 1e-15);
        let empty = p.project_above(p.ground());
        assert_eq!(empty.m(), 0);
        assert_eq!(empty.rank(Subset::EMPTY), 0.0);

        assert_eq!(p.restrict_below(p.ground()), p);
        let below = p.restrict_below(Subset::singleton(0));
        assert_abs_diff_eq!(below.rank(Subset(1)), 0.5, epsilon = 1e-15);
        assert_eq!(p.restrict_below(Subset::EMPTY).m(), 0);
    }

    #[test]
    fn nested_cuts_two_messages() {
        let p = gaussian(&[1.0, 2.0], 1.0);
        let cuts = p.nested_cuts(0).unwrap();
        assert_eq!(cuts.len(), 2);
        assert_abs_diff_eq!(cuts[0].axis_rate, p.rank(Subset(0b01)), epsilon = 1e-15);
        assert_abs_diff_eq!(
            cuts[1].axis_rate,
            p.sum_rate() - p.rank(Subset(0b10)),
            epsilon = 1e-15
        );
    }

    #[test]
    fn nested_cuts_three_equal_powers() {
        let p = gaussian(&[1.0, 1.0, 1.0], 1.0);
        let cuts = p.nested_cuts(0).unwrap();
        let interior = &cuts[0].child;
        let exterior = &cuts[2].child;
        for k in 0..2 {
            assert_abs_diff_eq!(
                interior.rank(Subset::singleton(k)),
                0.5 * (1.5f64).log2(),
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(exterior.rank(Subset::singleton(k)), 0.5, epsilon = 1e-15);
        }
        for cut in &cuts {
            assert!(validate_polymatroid(&cut.child).unwrap());
        }
    }

    #[test]
    fn nested_cuts_reject_single_message() {
        let p = gaussian(&[1.0], 1.0);
        assert!(p.nested_cuts(0).is_err());
    }

    #[test]
    fn decoding_order_must_be_permutation() {
        assert!(DecodingOrder::new(vec![0, 0]).is_err());
        assert!(DecodingOrder::new(vec![0, 2]).is_err());
        assert_eq!(DecodingOrder::all(4).len(), 24);
    }

    #[test]
    fn budget_simplex_nesting() {
        let small = PowerVectorSimplex::budgets(0.5, 1.0).unwrap();
        let big = PowerVectorSimplex::budgets(1.0, 1.0).unwrap();
        assert!(small.is_nested_in(&big));
        assert!(!big.is_nested_in(&small));
        assert!(big.contains(&[0.5, 0.5, 0.2, 0.8]));
        assert!(!small.contains(&[0.5, 0.5, 0.2, 0.8]));
        assert!(PowerVectorSimplex::new(2, vec![(vec![1.0, 0.0], 1.0)]).is_err());
    }

    #[test]
    fn simplex_grid_maximizer() {
        let s = PowerVectorSimplex::new(2, vec![(vec![1.0, 1.0], 2.0)]).unwrap();
        let (point, value) = s.maximize_on_grid(8, |p| p[0] + 2.0 * p[1]).unwrap();
        assert_eq!(point, vec![0.0, 2.0]);
        assert_abs_diff_eq!(value, 4.0, epsilon = 1e-15);
    }
}
