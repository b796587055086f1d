//! `verify-flux`: evaluate the Green's-theorem identities over the configured
//! region families on a refinement ladder, reporting residuals and observed
//! orders.

use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use radwave_core::energy::{mu_accumulate, origin_limit_check};
use radwave_core::{
    flux_identity_residual, init_state, run, triangle_law_report, FluxFamily, GridSpec, ProbeSet,
    Trajectory,
};

use crate::config::ScenarioConfig;
use crate::report::{out_path, print_verdicts, write_json, Metadata, Verdict};
use crate::scenario::{flux_regions, Scenario};

/// Residual gate, relative to E, for the defocusing model at the finest dr.
const RESIDUAL_TOL: f64 = 1e-2;
/// Residual gate for linear-mode rectangles (exact transport: rounding only).
const LINEAR_RESIDUAL_TOL: f64 = 1e-8;
/// Observed-order gate across the ladder.
const ORDER_MIN: f64 = 1.8;
/// Residuals below this fraction of E count as telescoping exactly; no order
/// can be measured on rounding noise.
const EXACT_FLOOR: f64 = 1e-10;

#[derive(Serialize)]
struct ResidualRow {
    region: String,
    family: &'static str,
    flux_family: String,
    residuals: Vec<f64>,
    orders: Vec<f64>,
    exact_telescoping: bool,
}

#[derive(Serialize)]
struct FluxReport<'a> {
    metadata: Metadata,
    scenario: &'a ScenarioConfig,
    refinements: Vec<f64>,
    energy: f64,
    rows: Vec<ResidualRow>,
    triangle_laws: Vec<TriangleRow>,
    origin_limit: Vec<OriginLimitRow>,
    verdicts: &'a [Verdict],
}

#[derive(Serialize)]
struct TriangleRow {
    t0: f64,
    r0: f64,
    inward_energy: f64,
    origin_term: f64,
    cone_flux: f64,
    bulk_term: f64,
    residual: f64,
}

#[derive(Serialize)]
struct OriginLimitRow {
    radius: f64,
    line_value: f64,
    throughput: f64,
}

pub fn execute(scenario: &Scenario, out_dir: &Path, stamped: bool) -> anyhow::Result<bool> {
    let flux = scenario
        .config
        .flux
        .as_ref()
        .context("verify-flux needs a [flux] section in the config")?;

    // One run per refinement level, in parallel; regions are rebuilt on each
    // lattice from their physical coordinates.
    let runs: Vec<(GridSpec, Trajectory)> = flux
        .refinements
        .par_iter()
        .map(|&dr| -> anyhow::Result<(GridSpec, Trajectory)> {
            let grid = GridSpec::new(dr, scenario.grid.r_max(), scenario.grid.t_end())
                .map_err(anyhow::Error::msg)?;
            let named = flux_regions(flux, &grid)?;
            let snapshot_times: Vec<f64> = flux.triangles.iter().map(|t| t[0]).collect();
            let watch_radii = vec![4.0 * dr, 16.0 * dr, 64.0 * dr];
            let probes = ProbeSet {
                regions: named.into_iter().map(|n| n.region).collect(),
                snapshot_times,
                watch_radii,
                ..ProbeSet::none()
            };
            let initial =
                init_state(&scenario.profile, &grid).map_err(anyhow::Error::msg)?;
            let traj =
                run(initial, &grid, &scenario.params, &probes).map_err(anyhow::Error::msg)?;
            Ok((grid, traj))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let finest = runs.len() - 1;
    let energy = runs[finest].1.initial_energy();
    let linear = scenario.params.is_linear();
    let named_finest = flux_regions(flux, &runs[finest].0)?;

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for (region_idx, named) in named_finest.iter().enumerate() {
        for family in [FluxFamily::Inward, FluxFamily::Outward] {
            let mut residuals = Vec::new();
            for (grid, traj) in &runs {
                let regions = flux_regions(flux, grid)?;
                let report =
                    flux_identity_residual(traj, &regions[region_idx].region, family)
                        .map_err(anyhow::Error::msg)?;
                residuals.push(report.residual);
            }
            let exact = residuals[0] <= EXACT_FLOOR * energy;
            let orders: Vec<f64> = if exact {
                Vec::new()
            } else {
                residuals
                    .windows(2)
                    .map(|w| (w[0] / w[1].max(1e-300)).log2())
                    .collect()
            };
            let family_name = format!("{family:?}").to_lowercase();
            let name = format!("{} [{}]", named.name, family_name);
            let tol = if linear { LINEAR_RESIDUAL_TOL } else { RESIDUAL_TOL };
            verdicts.push(Verdict::upper(
                &format!("residual {name}"),
                residuals[finest],
                tol * energy,
                0.0,
            ));
            if !exact && runs.len() >= 2 {
                let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
                verdicts.push(Verdict::lower(&format!("order {name}"), worst, ORDER_MIN, 0.0));
            }
            rows.push(ResidualRow {
                region: named.name.clone(),
                family: named.family,
                flux_family: family_name,
                residuals,
                orders,
                exact_telescoping: exact,
            });
        }
    }

    // Triangle laws on the finest lattice.
    let mut triangle_laws = Vec::new();
    for &[t0, r0] in &flux.triangles {
        let report =
            triangle_law_report(&runs[finest].1, t0, r0).map_err(anyhow::Error::msg)?;
        verdicts.push(Verdict::upper(
            &format!("triangle-law residual t0={t0} r0={r0}"),
            report.residual,
            RESIDUAL_TOL * energy,
            0.0,
        ));
        triangle_laws.push(TriangleRow {
            t0,
            r0,
            inward_energy: report.inward_energy,
            origin_term: report.origin_term,
            cone_flux: report.cone_flux,
            bulk_term: report.bulk_term,
            residual: report.residual,
        });
    }

    // Origin-measure cross-check on the finest lattice.
    let t_end = scenario.grid.t_end();
    let throughput =
        mu_accumulate(&runs[finest].1, 0.0, t_end).map_err(anyhow::Error::msg)?;
    let ladder =
        origin_limit_check(&runs[finest].1, 0.0, t_end).map_err(anyhow::Error::msg)?;
    let origin_limit: Vec<OriginLimitRow> = ladder
        .iter()
        .map(|&(radius, line_value)| OriginLimitRow {
            radius,
            line_value,
            throughput,
        })
        .collect();
    if let Some(first) = origin_limit.first() {
        if throughput > 0.0 {
            verdicts.push(Verdict::upper(
                "origin-limit cross-check",
                (first.line_value - throughput).abs(),
                0.05 * throughput,
                0.0,
            ));
        }
    }

    if scenario.config.output.formats.iter().any(|f| f == "json") {
        let report = FluxReport {
            metadata: Metadata::new(stamped),
            scenario: &scenario.config,
            refinements: flux.refinements.clone(),
            energy,
            rows,
            triangle_laws,
            origin_limit,
            verdicts: &verdicts,
        };
        write_json(&out_path(out_dir, "flux_report.json"), &report)?;
    }

    Ok(print_verdicts(&verdicts))
}
