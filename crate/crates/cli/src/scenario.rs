//! Bridge from a validated configuration to core runs and shared report
//! fragments.

use anyhow::Context;
use serde::Serialize;

use radwave_core::{
    init_state, reverse_time, run, GridSpec, ModelParams, PolygonRegion, ProbeSet, RadialProfile,
    Trajectory, TwoSidedTrajectory,
};

use crate::config::{FluxSection, ProbeSection, ScenarioConfig};

/// Everything a command needs to start running.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub params: ModelParams,
    pub grid: GridSpec,
    pub profile: RadialProfile,
}

impl Scenario {
    /// Build and cross-validate the run ingredients.
    pub fn prepare(config: ScenarioConfig) -> anyhow::Result<Self> {
        let params = config.params()?;
        let grid = config.grid()?;
        let profile = config.profile()?;
        Ok(Self {
            config,
            params,
            grid,
            profile,
        })
    }

    /// Probe set from the config section, optionally extended with regions.
    pub fn probes(&self, extra_regions: Vec<PolygonRegion>) -> ProbeSet {
        probe_set(&self.config.probes, extra_regions)
    }

    /// Forward run from the configured data.
    pub fn run_forward(&self, probes: &ProbeSet) -> anyhow::Result<Trajectory> {
        let initial = init_state(&self.profile, &self.grid).map_err(anyhow::Error::msg)?;
        run(initial, &self.grid, &self.params, probes).map_err(anyhow::Error::msg)
    }

    /// Two-sided run; the two directions execute in parallel.
    pub fn run_two_sided(
        &self,
        forward_probes: &ProbeSet,
        backward_probes: &ProbeSet,
    ) -> anyhow::Result<TwoSidedTrajectory> {
        let initial = init_state(&self.profile, &self.grid).map_err(anyhow::Error::msg)?;
        let reversed = reverse_time(&initial);
        let (fwd, rev) = rayon::join(
            || run(initial, &self.grid, &self.params, forward_probes),
            || run(reversed, &self.grid, &self.params, backward_probes),
        );
        Ok(TwoSidedTrajectory {
            forward: fwd.map_err(anyhow::Error::msg).context("forward run")?,
            backward: rev.map_err(anyhow::Error::msg).context("backward run")?,
        })
    }
}

/// Translate a probe section into a core probe set.
pub fn probe_set(section: &ProbeSection, extra_regions: Vec<PolygonRegion>) -> ProbeSet {
    ProbeSet {
        outgoing_traces: section.outgoing.clone(),
        incoming_traces: section.incoming.clone(),
        snapshot_times: section.snapshot_times.clone(),
        snapshot_stride: section.snapshot_stride,
        regions: extra_regions,
        radiation_board: section.radiation_board,
        incoming_board: section.incoming_board,
        watch_radii: section.watch_radii.clone(),
    }
}

/// Region families of the flux suite, mapped to one lattice.
pub fn flux_regions(flux: &FluxSection, grid: &GridSpec) -> anyhow::Result<Vec<NamedRegion>> {
    let cells_r = |x: f64| -> anyhow::Result<i64> {
        Ok(grid.radius_index(x).map_err(anyhow::Error::msg)? as i64)
    };
    let cells_t = |x: f64| -> anyhow::Result<i64> {
        Ok(grid.time_index(x).map_err(anyhow::Error::msg)? as i64)
    };
    let mut out = Vec::new();
    for &[r1, r2, t1, t2] in &flux.rectangles {
        out.push(NamedRegion {
            name: format!("rectangle r=[{r1},{r2}] t=[{t1},{t2}]"),
            family: "rectangle",
            region: PolygonRegion::rectangle(cells_r(r1)?, cells_r(r2)?, cells_t(t1)?, cells_t(t2)?)
                .map_err(anyhow::Error::msg)?,
        });
    }
    for &[t0, r0] in &flux.triangles {
        out.push(NamedRegion {
            name: format!("triangle t0={t0} r0={r0}"),
            family: "triangle",
            region: PolygonRegion::light_triangle(cells_t(t0)?, cells_r(r0)?)
                .map_err(anyhow::Error::msg)?,
        });
    }
    for &[t1, t2, s] in &flux.trapezoids {
        out.push(NamedRegion {
            name: format!("trapezoid t=[{t1},{t2}] s={s}"),
            family: "trapezoid",
            region: PolygonRegion::cone_trapezoid(cells_t(t1)?, cells_t(t2)?, cells_t(s)?)
                .map_err(anyhow::Error::msg)?,
        });
    }
    for &[t0, s, s2] in &flux.parallelograms {
        out.push(NamedRegion {
            name: format!("parallelogram t0={t0} s=[{s},{s2}]"),
            family: "parallelogram",
            region: PolygonRegion::incoming_parallelogram(cells_t(t0)?, cells_t(s)?, cells_t(s2)?)
                .map_err(anyhow::Error::msg)?,
        });
    }
    Ok(out)
}

/// A flux region with its display name.
pub struct NamedRegion {
    pub name: String,
    pub family: &'static str,
    pub region: PolygonRegion,
}

/// Down-sampled energy series for reports.
#[derive(Debug, Clone, Serialize)]
pub struct EnergySample {
    pub t: f64,
    pub total: f64,
    pub inward: f64,
    pub outward: f64,
    pub potential: f64,
}

/// Energy summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct EnergySummary {
    pub initial: f64,
    pub final_value: f64,
    pub max_relative_drift: f64,
    pub worst_inward_increase: f64,
    pub worst_outward_decrease: f64,
    pub series: Vec<EnergySample>,
}

impl EnergySummary {
    /// Summarize a run, keeping roughly `kept` series samples.
    pub fn from_run(traj: &Trajectory, kept: usize) -> Self {
        let series = &traj.energy_series;
        let n = series.total.len();
        let stride = (n / kept.max(1)).max(1);
        let samples = (0..n)
            .step_by(stride)
            .chain([n - 1])
            .map(|k| EnergySample {
                t: k as f64 * series.dt,
                total: series.total[k],
                inward: series.inward[k],
                outward: series.outward[k],
                potential: series.potential[k],
            })
            .collect();
        let (worst_in, worst_out) = series.monotonicity_violations();
        Self {
            initial: series.total[0],
            final_value: series.total[n - 1],
            max_relative_drift: series.max_relative_drift(),
            worst_inward_increase: worst_in,
            worst_outward_decrease: worst_out,
            series: samples,
        }
    }
}
