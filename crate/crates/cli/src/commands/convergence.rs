//! `convergence`: run the refinement ladder and report observed orders.

use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use radwave_core::{convergence_study, StudySpec};

use crate::config::ScenarioConfig;
use crate::report::{out_path, print_verdicts, write_json, Metadata, Verdict};
use crate::scenario::Scenario;

/// Required observed order of the second-order source quadrature.
const ORDER_MIN: f64 = 1.9;

#[derive(Serialize)]
struct ConvergenceOut<'a> {
    metadata: Metadata,
    scenario: &'a ScenarioConfig,
    levels: Vec<f64>,
    checkpoint_errors: Vec<f64>,
    checkpoint_orders: Vec<f64>,
    drifts: Vec<f64>,
    drift_orders: Vec<f64>,
    exact_transport: bool,
    verdicts: &'a [Verdict],
}

pub fn execute(scenario: &Scenario, out_dir: &Path, stamped: bool) -> anyhow::Result<bool> {
    let section = scenario
        .config
        .convergence
        .as_ref()
        .context("convergence needs a [convergence] section in the config")?;
    let spec = StudySpec {
        r_max: section.r_max,
        t_end: section.t_end,
        checkpoints: section.checkpoints.iter().map(|c| (c[0], c[1])).collect(),
    };
    let report = convergence_study(
        &scenario.profile,
        &scenario.params,
        &section.refinements,
        &spec,
    )
    .map_err(anyhow::Error::msg)?;

    let mut verdicts = Vec::new();
    if report.exact_transport {
        println!("exact transport: checkpoint errors at rounding level, no order to measure");
        verdicts.push(Verdict::flag("exact-transport", 0.0, 0.0, true));
    } else {
        let worst = report
            .checkpoint_orders
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        verdicts.push(Verdict::lower("checkpoint-order", worst, ORDER_MIN, 0.0));
        let worst_drift = report
            .drift_orders
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        verdicts.push(Verdict::lower("drift-order", worst_drift, ORDER_MIN, 0.0));
    }

    println!("level        dr    checkpoint-error        drift");
    for (k, &dr) in report.levels.iter().enumerate() {
        println!(
            "{k:>5}  {dr:>8.6}  {:>16.6e}  {:>11.4e}",
            report.checkpoint_errors[k], report.drifts[k]
        );
    }

    if scenario.config.output.formats.iter().any(|f| f == "json") {
        let out = ConvergenceOut {
            metadata: Metadata::new(stamped),
            scenario: &scenario.config,
            levels: report.levels.clone(),
            checkpoint_errors: report.checkpoint_errors.clone(),
            checkpoint_orders: report.checkpoint_orders.clone(),
            drifts: report.drifts.clone(),
            drift_orders: report.drift_orders.clone(),
            exact_transport: report.exact_transport,
            verdicts: &verdicts,
        };
        write_json(&out_path(out_dir, "convergence_report.json"), &out)?;
    }

    Ok(print_verdicts(&verdicts))
}
