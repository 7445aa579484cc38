use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gic_core::hk_region::{time_sharing_decomposition, TimeSharing, WsrSolution};
use gic_core::layers::{convergence_test, ConvergenceReport};
use gic_core::optimizer::{
    all_private_optimum_with, saturation_levels_with, solve_sweep_with, AllPrivateSolution,
    BoundaryPoint, Comparison, ComparisonRow, SaturationResult,
};
use gic_core::{GicError, PowerSplit};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Scenario;
use crate::error::CliError;
use crate::plot::{render, Chart, Series};
use crate::validate::run_suite;

pub const BOUNDARY_HEADER: &str = "mu,r1,r2,r_u1,r_v1,r_u2,r_v2,pv1,pv2,dominant";
pub const ALL_PRIVATE_HEADER: &str = "mu,q1,q2,r1,r2,all_private_objective,full_objective,gap";
pub const SATURATION_HEADER: &str = "mu,p_hat_1,p_hat_2,r_sat_1,r_sat_2,residual";
pub const LAYERS_HEADER: &str = "delta,max_abs_error,ratio";

/// Files written and a short human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// Some check inside the command did not pass.
    pub failed: bool,
}

fn write_file(
    dir: &Path,
    name: &str,
    contents: &str,
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// One record of the per-mu solution file.
#[derive(Debug, Serialize)]
pub struct SolutionRecord<'a> {
    #[serde(flatten)]
    pub solution: &'a WsrSolution,
    pub split: PowerSplit,
    pub time_sharing: Option<TimeSharing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_sharing_error: Option<String>,
}

pub fn cmd_region(sc: &Scenario, out: &Path, plot: bool) -> Result<Outcome, CliError> {
    let cp = &sc.params;
    let cfg = &sc.options.search;
    let optima = solve_sweep_with(cp, &sc.mu_grid, cfg)?;
    let private: Vec<AllPrivateSolution> = sc
        .mu_grid
        .par_iter()
        .map(|&mu| all_private_optimum_with(cp, mu, cfg))
        .collect::<Result<_, GicError>>()?;

    let mut files = Vec::new();
    let mut boundary = format!("{BOUNDARY_HEADER}\n");
    let mut records = Vec::with_capacity(optima.len());
    for opt in &optima {
        let p = BoundaryPoint::from_optimum(opt);
        let mut fields = vec![p.mu, p.r1, p.r2];
        fields.extend(p.rates);
        fields.extend([p.split.pv1, p.split.pv2]);
        let mut fields: Vec<String> = fields.iter().map(|v| format!("{v:?}")).collect();
        fields.push(p.dominant.as_str().to_string());
        boundary.push_str(&csv_line(&fields));

        let ts = time_sharing_decomposition(cp, &opt.split, &opt.solution);
        records.push(SolutionRecord {
            solution: &opt.solution,
            split: opt.split,
            time_sharing_error: ts.as_ref().err().map(|e| e.to_string()),
            time_sharing: ts.ok(),
        });
    }
    write_file(out, "boundary.csv", &boundary, &mut files)?;
    write_file(
        out,
        "solutions.json",
        &(serde_json::to_string_pretty(&records)? + "\n"),
        &mut files,
    )?;

    let rows: Vec<ComparisonRow> = optima
        .iter()
        .zip(&private)
        .map(|(o, a)| ComparisonRow {
            mu: a.mu,
            all_private: a.objective,
            full: o.solution.objective,
        })
        .collect();
    let mut table = format!("{ALL_PRIVATE_HEADER}\n");
    for (row, a) in rows.iter().zip(&private) {
        let f = [
            row.mu,
            a.used_powers.0,
            a.used_powers.1,
            a.rates.0,
            a.rates.1,
            row.all_private,
            row.full,
            row.gap(),
        ];
        table.push_str(&csv_line(&f.map(|v| format!("{v:?}"))));
    }
    write_file(out, "all_private.csv", &table, &mut files)?;
    let cmp = Comparison::from_rows(rows);

    if plot {
        let chart = Chart {
            title: "Rate-region boundary".into(),
            x_label: "R1 (bits/use)".into(),
            y_label: "R2 (bits/use)".into(),
            series: vec![
                Series {
                    name: "power split".into(),
                    color: "#1f77b4",
                    points: optima.iter().map(|o| o.solution.user_rates()).collect(),
                },
                Series {
                    name: "all private".into(),
                    color: "#d62728",
                    points: private.iter().map(|a| a.rates).collect(),
                },
            ],
            ..Chart::default()
        };
        write_file(out, "region.svg", &render(&chart), &mut files)?;
    }

    let mut summary = format!("{} boundary points", optima.len());
    match cmp.agreement {
        Some((lo, hi)) => {
            let _ = write!(summary, "; all-private optimal for mu in [{lo}, {hi}]");
        }
        None => summary.push_str("; all-private never optimal"),
    }
    if !cmp.contiguous {
        summary.push_str(" (not contiguous)");
    }
    Ok(Outcome {
        files,
        summary,
        failed: false,
    })
}

pub fn cmd_saturation(sc: &Scenario, out: &Path) -> Result<Outcome, CliError> {
    let results: Vec<Result<SaturationResult, GicError>> = sc
        .mu_grid
        .par_iter()
        .map(|&mu| saturation_levels_with(&sc.params, mu, &sc.options.search))
        .collect();
    let mut csv = format!("{SATURATION_HEADER}\n");
    let mut failures = Vec::new();
    let mut unverified = 0;
    for r in results {
        match r {
            Ok(s) => {
                if !s.verified {
                    unverified += 1;
                }
                let f = [
                    s.mu,
                    s.p_hat_1,
                    s.p_hat_2,
                    s.r_sat_1,
                    s.r_sat_2,
                    s.residual_public_power,
                ];
                csv.push_str(&csv_line(&f.map(|v| format!("{v:?}"))));
            }
            Err(e @ GicError::VerificationFailed { .. }) => failures.push(e.to_string()),
            Err(e) => return Err(e.into()),
        }
    }
    let mut files = Vec::new();
    write_file(out, "saturation.csv", &csv, &mut files)?;
    let mut summary = format!(
        "{} of {} mu values verified",
        sc.mu_grid.len() - failures.len() - unverified,
        sc.mu_grid.len()
    );
    for f in &failures {
        let _ = write!(summary, "\n{f}");
    }
    Ok(Outcome {
        files,
        summary,
        failed: !failures.is_empty(),
    })
}

pub fn layer_report(sc: &Scenario) -> Result<ConvergenceReport, CliError> {
    let (pv1, pv2) = sc.layer_split();
    let ps = PowerSplit::from_private(&sc.params, pv1, pv2)?;
    Ok(convergence_test(&sc.params, &ps, &sc.options.deltas)?)
}

pub fn cmd_layers(sc: &Scenario, out: &Path, plot: bool) -> Result<Outcome, CliError> {
    let report = layer_report(sc)?;
    let mut csv = format!("{LAYERS_HEADER}\n");
    for r in &report.rows {
        let ratio = r.ratio.map(|x| format!("{x:?}")).unwrap_or_default();
        csv.push_str(&csv_line(&[
            format!("{:?}", r.delta),
            format!("{:?}", r.max_abs_error),
            ratio,
        ]));
    }
    let mut files = Vec::new();
    write_file(out, "layers.csv", &csv, &mut files)?;
    if plot {
        let chart = Chart {
            title: "Layer aggregate error".into(),
            x_label: "delta".into(),
            y_label: "max abs error (bits/use)".into(),
            log_x: true,
            log_y: true,
            series: vec![Series {
                name: "error".into(),
                color: "#2ca02c",
                points: report
                    .rows
                    .iter()
                    .map(|r| (r.delta, r.max_abs_error))
                    .collect(),
            }],
        };
        write_file(out, "layers.svg", &render(&chart), &mut files)?;
    }
    let worst = report
        .rows
        .iter()
        .map(|r| r.max_abs_error)
        .fold(0.0, f64::max);
    let verdict = if report.exact() {
        "exact at every delta"
    } else if report.converges() {
        "converging"
    } else {
        "not converging"
    };
    Ok(Outcome {
        files,
        summary: format!(
            "{} deltas, worst error {worst:e}, {verdict}",
            report.rows.len()
        ),
        failed: !report.converges(),
    })
}

pub fn cmd_validate(sc: &Scenario, out: &Path, inject_fault: bool) -> Result<Outcome, CliError> {
    let report = run_suite(
        &sc.params,
        sc.options.seed,
        sc.options.instances,
        &sc.options.search,
        inject_fault,
    )?;
    let text = report.render();
    let mut files = Vec::new();
    write_file(out, "validate_report.txt", &text, &mut files)?;
    Ok(Outcome {
        files,
        summary: text,
        failed: !report.passed(),
    })
}
