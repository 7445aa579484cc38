//! Seeded property suite behind `gic validate`.

use std::fmt::Write as _;

use gic_core::epi::{epi_bounds, gaussian_equiv_power, EpiQuery};
use gic_core::gaussian_mac::{build_overline_mac, dummy_message, hk_mac, sum_rate_front};
use gic_core::hk_region::{build_polytope, max_wsr_value, p0_slice_check};
use gic_core::layers::{aggregate_rates, build_stacks, closed_form_rates};
use gic_core::optimizer::{all_private_optimum_with, full_power_fraction, SearchConfig};
use gic_core::{ChannelParams, DecodingOrder, Message, Polymatroid, PowerSplit, Receiver, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

const AXIOM_TOL: f64 = 1e-12;
const FRONT_TOL: f64 = 1e-12;
const SLICE_TOL: f64 = 1e-9;
const LP_TOL: f64 = 1e-10;
const EPI_TOL: f64 = 1e-12;
const FULL_POWER_TOL: f64 = 1e-6;
const TELESCOPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest residual seen across instances.
    pub worst: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        let _ = writeln!(
            out,
            "{:<22} {:<6} {:>9} {:>9}  worst",
            "check", "result", "instances", "failures"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<22} {:<6} {:>9} {:>9}  {:e}",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.instances,
                c.failures,
                c.worst
            );
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "validation FAILED"
            }
        );
        out
    }
}

/// Random weak instance with a random split. Budgets in `[0.1, 10]`, gains in
/// `[0, 0.95)`.
pub fn random_instance(rng: &mut impl Rng) -> (ChannelParams, PowerSplit) {
    let cp = ChannelParams::new(
        rng.gen_range(0.0..0.95),
        rng.gen_range(0.0..0.95),
        rng.gen_range(0.1..10.0),
        rng.gen_range(0.1..10.0),
        1.0,
    )
    .expect("sampled inside the weak regime");
    let ps = PowerSplit::from_private(&cp, rng.gen_range(0.0..=cp.p1), rng.gen_range(0.0..=cp.p2))
        .expect("private powers within budget");
    (cp, ps)
}

struct Tally {
    result: CheckResult,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            result: CheckResult {
                name,
                instances: 0,
                failures: 0,
                worst: 0.0,
            },
        }
    }

    fn record(&mut self, residual: f64, tol: f64) {
        self.result.instances += 1;
        self.result.worst = self.result.worst.max(residual);
        if !(residual <= tol) {
            self.result.failures += 1;
        }
    }
}

fn worst_axiom_gap(p: &Polymatroid) -> f64 {
    let r = p.check_axioms();
    r.normalization_gap
        .max(r.monotonicity_gap)
        .max(r.submodularity_gap)
}

fn corner_front_residual(cp: &ChannelParams, ps: &PowerSplit, rx: Receiver) -> f64 {
    let mac = build_overline_mac(cp, ps, rx);
    let front = sum_rate_front(cp, rx);
    DecodingOrder::all(4)
        .iter()
        .map(|ord| {
            let r = mac.corner_rates(ord).expect("order of length four");
            let infeasible = if mac.contains(&r) { 0.0 } else { f64::INFINITY };
            (r.iter().sum::<f64>() - front).abs().max(infeasible)
        })
        .fold(0.0, f64::max)
}

fn greedy_residual(mac: &Polymatroid, rng: &mut impl Rng) -> f64 {
    let corners: Vec<Vec<f64>> = DecodingOrder::all(mac.m())
        .iter()
        .map(|o| mac.corner_rates(o).expect("valid order"))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let w: Vec<f64> = (0..mac.m()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let dot = |r: &[f64]| r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let brute = corners
            .iter()
            .map(|c| dot(c))
            .fold(f64::NEG_INFINITY, f64::max);
        let (greedy, _) = mac.max_weighted_sum(&w).expect("nonnegative weights");
        worst = worst.max((dot(greedy.rates()) - brute).abs());
    }
    worst
}

fn projection_residual(cp: &ChannelParams, ps: &PowerSplit, rx: Receiver) -> f64 {
    let full = build_overline_mac(cp, ps, rx);
    let projected = full.project_above(Subset::from_indices([dummy_message(rx).index()]));
    let hk = hk_mac(cp, ps, rx);
    (1..8u32)
        .map(|s| (projected.rank(Subset(s)) - hk.rank(Subset(s))).abs())
        .fold(0.0, f64::max)
}

/// Runs every property check on `instances` random instances from `seed`.
/// With `inject_fault`, one rank value of each four-input region is raised
/// before the axiom check, which must then fail.
pub fn run_suite(
    base: &ChannelParams,
    seed: u64,
    instances: usize,
    search: &SearchConfig,
    inject_fault: bool,
) -> Result<ValidationReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut axioms = Tally::new("polymatroid-axioms");
    let mut corners = Tally::new("corner-points");
    let mut greedy = Tally::new("greedy-vs-corners");
    let mut projection = Tally::new("projection-identity");
    let mut slice = Tally::new("slice-coincidence");
    let mut slice_lp = Tally::new("slice-lp-optimum");
    let mut epi = Tally::new("epi-coincidence");
    let mut full_power = Tally::new("full-power");
    let mut layers = Tally::new("layer-telescoping");

    for k in 0..instances {
        let (cp, ps) = if k == 0 {
            (
                *base,
                PowerSplit::from_private(base, 0.5 * base.p1, 0.5 * base.p2)?,
            )
        } else {
            random_instance(&mut rng)
        };

        for rx in Receiver::BOTH {
            let mut mac = build_overline_mac(&cp, &ps, rx);
            if inject_fault {
                mac = mac.perturbed(mac.ground(), 0.5);
            }
            axioms.record(
                worst_axiom_gap(&mac).max(worst_axiom_gap(&hk_mac(&cp, &ps, rx))),
                AXIOM_TOL,
            );
            corners.record(corner_front_residual(&cp, &ps, rx), FRONT_TOL);
            greedy.record(
                greedy_residual(&build_overline_mac(&cp, &ps, rx), &mut rng),
                FRONT_TOL,
            );
            projection.record(projection_residual(&cp, &ps, rx), AXIOM_TOL);
        }

        let mu = rng.gen_range(0.0..4.0);
        match p0_slice_check(&cp, &ps) {
            Ok(report) => {
                let lp_gap = (max_wsr_value(&report.slice_polytope, mu)
                    - max_wsr_value(&build_polytope(&cp, &ps), mu))
                .abs();
                slice.record(report.max_residual, SLICE_TOL);
                slice_lp.record(lp_gap, LP_TOL);
            }
            Err(_) => {
                slice.record(f64::INFINITY, SLICE_TOL);
                slice_lp.record(f64::INFINITY, LP_TOL);
            }
        }

        let power = rng.gen_range(0.01..100.0);
        let h = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * power).log2();
        let p_eq = gaussian_equiv_power(h);
        let tight = epi_bounds(&EpiQuery::new(h, Some(p_eq)));
        let loose = epi_bounds(&EpiQuery::new(h, Some(p_eq * (1.0 + 1e-6))));
        let strict_gap = loose.upper.unwrap() - loose.lower;
        let residual = (tight.upper.unwrap() - tight.lower)
            .abs()
            .max(if strict_gap > 0.0 { 0.0 } else { 1.0 });
        epi.record(residual, EPI_TOL);

        let mu = [0.25, 1.0, 4.0][k % 3];
        let ap = all_private_optimum_with(&cp, mu, search)?;
        full_power.record(
            (1.0 - full_power_fraction(&cp, &ap)).max(0.0),
            FULL_POWER_TOL,
        );

        let min_power = Message::ALL
            .iter()
            .map(|&m| ps.power(m))
            .filter(|p| *p > 0.0)
            .fold(f64::INFINITY, f64::min);
        let delta = min_power / 3.0;
        let stacks = build_stacks(&cp, &ps, delta)?;
        let agg = aggregate_rates(&stacks)?;
        let target = closed_form_rates(&cp, &ps, Message::U1)?;
        let err = agg
            .base
            .rates()
            .iter()
            .zip(target.base.rates())
            .map(|(a, b)| (a - b).abs())
            .chain([
                (agg.dummy_v2_at_y1 - target.dummy_v2_at_y1).abs(),
                (agg.dummy_v1_at_y2 - target.dummy_v1_at_y2).abs(),
            ])
            .fold(0.0, f64::max);
        layers.record(err, TELESCOPE_TOL);
    }

    Ok(ValidationReport {
        seed,
        checks: [
            axioms, corners, greedy, projection, slice, slice_lp, epi, full_power, layers,
        ]
        .into_iter()
        .map(|t| t.result)
        .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ChannelParams {
        ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).unwrap()
    }

    fn quick() -> SearchConfig {
        SearchConfig {
            all_private_grid: 32,
            split_grid: 8,
            refine_rounds: 2,
        }
    }

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run_suite(&base(), 7, 8, &quick(), false).unwrap();
        assert!(a.passed(), "{}", a.render());
        let b = run_suite(&base(), 7, 8, &quick(), false).unwrap();
        assert_eq!(a.render(), b.render());
    }

    #[test]
    fn injected_fault_breaks_axioms_only() {
        let r = run_suite(&base(), 7, 4, &quick(), true).unwrap();
        assert!(!r.passed());
        let failing: Vec<&str> = r
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect();
        assert_eq!(failing, vec!["polymatroid-axioms"]);
    }
}
