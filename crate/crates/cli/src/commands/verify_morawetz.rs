//! `verify-morawetz`: evaluate the centered space-time inequality, its radial
//! identity, the derived global bounds, and the energy-distribution
//! comparison at the configured radii.

use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use radwave_core::{morawetz_report, MorawetzReport};

use crate::config::ScenarioConfig;
use crate::report::{out_path, print_verdicts, write_json, Metadata, Verdict};
use crate::scenario::Scenario;

/// Slack on "sum ≤ E".
const SUM_TOL: f64 = 1e-3;
/// Discretization slack, relative to E, in the identity comparison.
const IDENTITY_TOL: f64 = 1e-2;
/// Slack on the derived closed-form bounds.
const BOUND_TOL: f64 = 1e-6;

#[derive(Serialize)]
struct RadiusRow {
    radius: f64,
    terms: [f64; 4],
    sum: f64,
    energy: f64,
    boundary_diff: f64,
    identity_defect: f64,
    window_spacetime: (f64, f64),
    axis_line: Option<(f64, f64)>,
    spacetime_rp: (f64, f64),
    line_usq: (f64, f64),
    distribution_lhs: f64,
    distribution_rhs: f64,
}

#[derive(Serialize)]
struct MorawetzOut<'a> {
    metadata: Metadata,
    scenario: &'a ScenarioConfig,
    horizon: f64,
    rows: Vec<RadiusRow>,
    verdicts: &'a [Verdict],
}

pub fn execute(scenario: &Scenario, out_dir: &Path, stamped: bool) -> anyhow::Result<bool> {
    let section = scenario
        .config
        .morawetz
        .as_ref()
        .context("verify-morawetz needs a [morawetz] section in the config")?;

    // Watch the configured radii plus a small-radius ladder for the
    // line-integral bounds.
    let dr = scenario.grid.dr();
    let mut watch: Vec<f64> = vec![4.0 * dr, 16.0 * dr, 64.0 * dr];
    watch.extend(section.radii.iter().copied());
    let mut probes = scenario.probes(Vec::new());
    for r in watch {
        if !probes.watch_radii.iter().any(|w| (w - r).abs() < 1e-12) {
            probes.watch_radii.push(r);
        }
    }
    let pair = scenario.run_two_sided(&probes, &probes)?;

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for &radius in &section.radii {
        let report: MorawetzReport =
            morawetz_report(&pair, radius).map_err(anyhow::Error::msg)?;
        let e = report.energy;
        verdicts.push(Verdict::upper(
            &format!("centered-sum R={radius}"),
            report.sum,
            e,
            SUM_TOL,
        ));
        // The radial identity: the finite-horizon gap E − sum is explained by
        // the boundary terms, up to discretization.
        verdicts.push(Verdict::upper(
            &format!("identity-defect R={radius}"),
            (e - report.sum).abs(),
            (e - report.boundary_diff).abs() + IDENTITY_TOL * e,
            0.0,
        ));
        verdicts.push(Verdict::upper(
            &format!("distribution R={radius}"),
            report.distribution_lhs,
            report.distribution_rhs,
            1e-9,
        ));
        verdicts.push(
            Verdict::upper(
                &format!("windowed-spacetime-bound R={radius}"),
                report.window_spacetime.value,
                report.window_spacetime.bound,
                BOUND_TOL,
            )
            .closed_form(),
        );
        if let Some(axis) = report.axis_line {
            verdicts.push(
                Verdict::upper(
                    &format!("axis-line-bound R={radius}"),
                    axis.value,
                    axis.bound,
                    BOUND_TOL,
                )
                .closed_form(),
            );
        }
        verdicts.push(
            Verdict::upper(
                &format!("spacetime-weight-bound R={radius}"),
                report.spacetime_rp.value,
                report.spacetime_rp.bound,
                BOUND_TOL,
            )
            .closed_form(),
        );
        verdicts.push(
            Verdict::upper(
                &format!("line-usq-bound R={radius}"),
                report.line_usq.value,
                report.line_usq.bound,
                BOUND_TOL,
            )
            .closed_form(),
        );
        rows.push(RadiusRow {
            radius,
            terms: report.terms,
            sum: report.sum,
            energy: e,
            boundary_diff: report.boundary_diff,
            identity_defect: report.identity_defect,
            window_spacetime: (report.window_spacetime.value, report.window_spacetime.bound),
            axis_line: report.axis_line.map(|b| (b.value, b.bound)),
            spacetime_rp: (report.spacetime_rp.value, report.spacetime_rp.bound),
            line_usq: (report.line_usq.value, report.line_usq.bound),
            distribution_lhs: report.distribution_lhs,
            distribution_rhs: report.distribution_rhs,
        });
    }

    if scenario.config.output.formats.iter().any(|f| f == "json") {
        let report = MorawetzOut {
            metadata: Metadata::new(stamped),
            scenario: &scenario.config,
            horizon: scenario.grid.t_end(),
            rows,
            verdicts: &verdicts,
        };
        write_json(&out_path(out_dir, "morawetz_report.json"), &report)?;
    }

    Ok(print_verdicts(&verdicts))
}
