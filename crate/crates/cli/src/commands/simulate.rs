//! `simulate`: run the configured scenario, persist snapshots, origin series,
//! and a report with the conservation verdicts.

use std::path::Path;

use serde::Serialize;

use radwave_core::energy::mu_accumulate;
use radwave_core::{annulus_energy, pointwise_bound_report};

use crate::config::ScenarioConfig;
use crate::report::{
    out_path, print_verdicts, write_json, write_origin_csv, write_states_csv, Metadata, Verdict,
};
use crate::scenario::{EnergySummary, Scenario};

/// Relative energy-drift gate of the standard scenario.
const DRIFT_TOL: f64 = 1e-3;
/// Partition closure gate (E₋ + E₊ vs E), rounding-level.
const PARTITION_TOL: f64 = 1e-12;
/// Monotonicity violation gate, relative to E.
const MONOTONE_TOL: f64 = 1e-3;

#[derive(Serialize)]
struct AnnulusRow {
    t: f64,
    c: f64,
    beta: f64,
    inner: f64,
    annulus: f64,
    exterior: f64,
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    metadata: Metadata,
    scenario: &'a ScenarioConfig,
    energy: EnergySummary,
    origin_throughput: f64,
    truncation_tail_energy: f64,
    annuli: Vec<AnnulusRow>,
    verdicts: &'a [Verdict],
}

pub fn execute(scenario: &Scenario, out_dir: &Path, stamped: bool) -> anyhow::Result<bool> {
    let mut probes = scenario.probes(Vec::new());
    if probes.snapshot_stride.is_none() {
        probes.snapshot_stride = scenario.config.output.stride;
    }
    let traj = scenario.run_forward(&probes)?;

    let energy = EnergySummary::from_run(&traj, 64);
    let e0 = energy.initial;
    let pi = std::f64::consts::PI;
    let mu = mu_accumulate(&traj, 0.0, scenario.grid.t_end()).map_err(anyhow::Error::msg)?;

    let mut verdicts = vec![
        Verdict::upper("energy-drift", energy.max_relative_drift, DRIFT_TOL, 0.0),
        Verdict::upper(
            "inward-energy-monotone",
            energy.worst_inward_increase,
            MONOTONE_TOL * e0,
            0.0,
        ),
        Verdict::upper(
            "outward-energy-monotone",
            energy.worst_outward_decrease,
            MONOTONE_TOL * e0,
            0.0,
        ),
        Verdict::upper("origin-throughput-ceiling", pi * mu, e0, 1e-6),
    ];

    // Partition closure over the whole run.
    let series = &traj.energy_series;
    let mut worst_gap: f64 = 0.0;
    for n in 0..series.total.len() {
        worst_gap =
            worst_gap.max((series.inward[n] + series.outward[n] - series.total[n]).abs());
    }
    verdicts.push(Verdict::upper(
        "partition-closure",
        worst_gap,
        PARTITION_TOL * e0.max(1.0),
        0.0,
    ));

    // Pointwise envelopes on the stored snapshots.
    let mut worst_ratio: f64 = 0.0;
    for state in traj.snapshots.iter().chain([&traj.final_state]) {
        let report =
            pointwise_bound_report(state, e0, &scenario.params).map_err(anyhow::Error::msg)?;
        worst_ratio = worst_ratio.max(report.sqrt_ratio);
        if let Some(refined) = report.refined_ratio {
            worst_ratio = worst_ratio.max(refined);
        }
    }
    verdicts.push(Verdict::upper("pointwise-envelopes", worst_ratio, 1.0, 1e-6).closed_form());

    // Annulus splits at every snapshot time where the annulus is nonempty.
    let mut annuli = Vec::new();
    for spec in &scenario.config.probes.annuli {
        for state in traj.snapshots.iter().chain([&traj.final_state]) {
            if let Ok(report) = annulus_energy(state, spec.c, spec.beta, &scenario.params) {
                annuli.push(AnnulusRow {
                    t: report.t,
                    c: spec.c,
                    beta: spec.beta,
                    inner: report.inner,
                    annulus: report.annulus,
                    exterior: report.exterior,
                });
            }
        }
    }

    let formats = &scenario.config.output.formats;
    if formats.iter().any(|f| f == "csv") {
        write_states_csv(&out_path(out_dir, "states.csv"), &traj.snapshots)?;
        write_origin_csv(&out_path(out_dir, "origin.csv"), &traj)?;
    }
    if formats.iter().any(|f| f == "json") {
        let report = SimulateReport {
            metadata: Metadata::new(stamped),
            scenario: &scenario.config,
            energy,
            origin_throughput: pi * mu,
            truncation_tail_energy: scenario.profile.truncation_tail_energy(&scenario.params),
            annuli,
            verdicts: &verdicts,
        };
        write_json(&out_path(out_dir, "report.json"), &report)?;
    }

    Ok(print_verdicts(&verdicts))
}
