//! Products of a time integration: diagnostic series, characteristic traces,
//! per-label flux boards, state snapshots, and region ledgers.
//!
//! Everything here is recorded in a single pass while the solver advances, so
//! the scientifically binding integrals (origin throughput, flux boards,
//! region boundary terms) are always available at full time resolution while
//! the memory-hungry full states are kept only at requested times or strides.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::math;
use crate::params::{nonlinearity, ModelParams};
use crate::region::{PolygonRegion, RegionLedger, SideOrient};
use crate::state::FieldState;

/// Direction of a characteristic line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// t − r = τ constant; carries ψ = w_r − w_t outward.
    Outgoing,
    /// t + r = s constant; carries φ = w_r + w_t inward.
    Incoming,
}

/// Samples of one Riemann invariant along a fixed characteristic line.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicTrace {
    /// Line direction.
    pub kind: TraceKind,
    /// Label τ (outgoing) or s (incoming), in time units.
    pub label: f64,
    /// Signed lattice index of the label.
    pub label_index: i64,
    /// Sample times, one per step while the line is inside the grid.
    pub times: Vec<f64>,
    /// Transported invariant: ψ on outgoing lines, φ on incoming lines.
    pub invariant: Vec<f64>,
    /// The other invariant at the same grid point.
    pub co_invariant: Vec<f64>,
    /// w at the grid point on the line.
    pub w: Vec<f64>,
    /// Running ∫ N dt along the line (trapezoid of the sampled source).
    pub source_integral: Vec<f64>,
}

impl CharacteristicTrace {
    /// Index of the sample taken at time `t`.
    pub fn sample_at(&self, t: f64) -> Result<usize> {
        if self.times.is_empty() {
            return Err(Error::MissingProbe(format!(
                "trace {} has no samples",
                self.label
            )));
        }
        let dt = if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            1.0
        };
        let idx = math::round((t - self.times[0]) / dt);
        if idx < 0.0 || idx as usize >= self.times.len() {
            return Err(Error::Config(format!(
                "time {t} outside trace sample range [{}, {}]",
                self.times[0],
                self.times[self.times.len() - 1]
            )));
        }
        let k = idx as usize;
        if math::abs(self.times[k] - t) > 1e-9 * (1.0 + math::abs(t)) {
            return Err(Error::Misaligned(format!(
                "time {t} is not a sample time of the trace"
            )));
        }
        Ok(k)
    }

    /// Time span covered by the trace.
    pub fn span(&self) -> f64 {
        match self.times.len() {
            0 => 0.0,
            n => self.times[n - 1] - self.times[0],
        }
    }
}

/// Per-step energy functionals of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    /// Step size in time.
    pub dt: f64,
    /// Total energy E(t).
    pub total: Vec<f64>,
    /// Inward energy E₋(t; 0, r_max).
    pub inward: Vec<f64>,
    /// Outward energy E₊(t; 0, r_max).
    pub outward: Vec<f64>,
    /// Potential part (4π/(p+1)) ∫ |w|^{p+1}/r^{p−1} dr.
    pub potential: Vec<f64>,
    /// ∫₀^{r_max} |w|^{p+1}/r^p dr per step (no coefficient).
    pub weight_rp: Vec<f64>,
}

impl EnergySeries {
    /// Largest relative drift |E(t) − E(0)|/E(0) over the run.
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.total[0];
        if e0 == 0.0 {
            return 0.0;
        }
        self.total
            .iter()
            .map(|e| math::abs(e - e0) / e0)
            .fold(0.0, f64::max)
    }

    /// Worst single-step increase of E₋ and decrease of E₊ (both should be
    /// ≈ 0 for the defocusing flow; positive values are violations).
    pub fn monotonicity_violations(&self) -> (f64, f64) {
        let mut worst_in: f64 = 0.0;
        let mut worst_out: f64 = 0.0;
        for k in 1..self.inward.len() {
            worst_in = worst_in.max(self.inward[k] - self.inward[k - 1]);
            worst_out = worst_out.max(self.outward[k - 1] - self.outward[k]);
        }
        (worst_in, worst_out)
    }
}

/// Per-step origin values of u, always stored at full resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginSeries {
    /// Step size in time.
    pub dt: f64,
    /// First-interior-point estimate w(dr, t)/dr, O(dr).
    pub first: Vec<f64>,
    /// Richardson-refined estimate 2·w(dr,t)/dr − w(2dr,t)/(2dr), O(dr²).
    pub richardson: Vec<f64>,
}

impl OriginSeries {
    /// Origin throughput density |u(0, t_n)|² (the μ density).
    pub fn density(&self, n: usize) -> f64 {
        self.richardson[n] * self.richardson[n]
    }

    /// Cumulative throughput P(tₙ) = ∫₀^{tₙ} |u(0,t)|² dt: nondecreasing
    /// samples with P(0) = 0; the distribution function of the origin
    /// measure on the run's half of the horizon.
    pub fn cumulative(&self) -> Vec<f64> {
        let n = self.richardson.len();
        let mut out = alloc::vec![0.0; n];
        for k in 1..n {
            out[k] = out[k - 1] + 0.5 * self.dt * (self.density(k - 1) + self.density(k));
        }
        out
    }
}

/// Per-step functionals split at one watched radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSeries {
    /// Watched radius.
    pub radius: f64,
    /// Lattice index of the radius.
    pub index: usize,
    /// |u(R, t)|².
    pub u_sq: Vec<f64>,
    /// Reduced-form energy 2π∫₀^R (w_r² + w_t² + (2/(p+1))|w|^{p+1}/r^{p−1}).
    pub interior_wform: Vec<f64>,
    /// ∫₀^R |w|^{p+1}/r^{p−1} dr (no coefficient).
    pub interior_pot: Vec<f64>,
    /// ∫_R^{r_max} |w|^{p+1}/r^p dr (no coefficient).
    pub exterior_rp: Vec<f64>,
    /// φ(R, t)².
    pub phi_sq: Vec<f64>,
    /// ψ(R, t)².
    pub psi_sq: Vec<f64>,
    /// Point value |w(R,t)|^{p+1}/R^{p−1}.
    pub pot_point: Vec<f64>,
}

impl RadiusSeries {
    /// Energy inside the 3D ball of the watched radius:
    /// interior w-form minus the boundary term 2πR|u(R,t)|².
    pub fn interior_3d(&self, n: usize) -> f64 {
        self.interior_wform[n] - 2.0 * core::f64::consts::PI * self.radius * self.u_sq[n]
    }
}

/// Per-label accumulators on the outgoing characteristic lattice
/// (τ = k·dt, k from −n_r to n_steps).
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationBoard {
    /// Label spacing (the time step).
    pub dt: f64,
    /// Smallest label index (= −n_r).
    pub min_label: i64,
    /// Latest ψ sample per label (the radiation-profile estimate).
    pub last_value: Vec<f64>,
    /// Time of the latest sample per label.
    pub last_time: Vec<f64>,
    /// Outgoing flux Q₊⁺(τ) = (4π/(p+1)) ∫ |w|^{p+1}/(t−τ)^{p−1} dt.
    pub flux_pot: Vec<f64>,
    /// M(τ) = ∫ |w(t−τ, t)|^{p+1}/(t−τ)^p dt.
    pub weight_rp: Vec<f64>,
    /// J(τ) = ∫ |w(t−τ, t)|^p/(t−τ)^{p−1} dt.
    pub weight_mixed: Vec<f64>,
}

impl RadiationBoard {
    /// Number of labels.
    pub fn len(&self) -> usize {
        self.last_value.len()
    }

    /// True when the board has no labels.
    pub fn is_empty(&self) -> bool {
        self.last_value.is_empty()
    }

    /// Label value of array slot `idx`.
    pub fn label(&self, idx: usize) -> f64 {
        (self.min_label + idx as i64) as f64 * self.dt
    }

    /// Array slot of a signed label index.
    pub fn slot(&self, label_index: i64) -> Option<usize> {
        let s = label_index - self.min_label;
        if s < 0 || s as usize >= self.len() {
            None
        } else {
            Some(s as usize)
        }
    }
}

/// Per-label accumulators on the incoming characteristic lattice
/// (s = k·dt, k from 0 to n_steps + n_r).
#[derive(Debug, Clone, PartialEq)]
pub struct IncomingBoard {
    /// Label spacing (the time step).
    pub dt: f64,
    /// Latest φ sample per label.
    pub last_value: Vec<f64>,
    /// Time of the latest sample per label.
    pub last_time: Vec<f64>,
    /// Incoming flux Q₋⁻(s) = (4π/(p+1)) ∫ |w(s−t, t)|^{p+1}/(s−t)^{p−1} dt,
    /// accumulated over the label's whole in-grid span.
    pub flux_pot: Vec<f64>,
}

impl IncomingBoard {
    /// Label value of array slot `idx`.
    pub fn label(&self, idx: usize) -> f64 {
        idx as f64 * self.dt
    }
}

/// What to record during a run. All coordinates are in physical units and
/// must sit on the lattice; `run` rejects misaligned registrations.
#[derive(Debug, Clone, Default)]
pub struct ProbeSet {
    /// Outgoing characteristic labels τ to trace at full resolution.
    pub outgoing_traces: Vec<f64>,
    /// Incoming characteristic labels s to trace at full resolution.
    pub incoming_traces: Vec<f64>,
    /// Times at which to keep full state snapshots.
    pub snapshot_times: Vec<f64>,
    /// Keep a snapshot every this many steps (besides `snapshot_times`).
    pub snapshot_stride: Option<usize>,
    /// Regions whose boundary and bulk integrals are accumulated.
    pub regions: Vec<PolygonRegion>,
    /// Accumulate the per-label outgoing board (radiation extraction).
    pub radiation_board: bool,
    /// Accumulate the per-label incoming board (cone-flux ladder).
    pub incoming_board: bool,
    /// Radii whose interior/exterior splits are recorded every step.
    pub watch_radii: Vec<f64>,
}

impl ProbeSet {
    /// Probes for a plain run: no traces, no boards, no snapshots.
    pub fn none() -> Self {
        Self::default()
    }
}

/// Everything recorded over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Grid the run used.
    pub grid: GridSpec,
    /// Model parameters of the run.
    pub params: ModelParams,
    /// Per-step energy functionals.
    pub energy_series: EnergySeries,
    /// Per-step origin estimates (μ density source).
    pub origin_series: OriginSeries,
    /// Full states at requested times/strides, in time order.
    pub snapshots: Vec<FieldState>,
    /// Registered characteristic traces.
    pub traces: Vec<CharacteristicTrace>,
    /// Ledgers of registered regions, in registration order.
    pub region_ledgers: Vec<RegionLedger>,
    /// Outgoing per-label board, when registered.
    pub outgoing_board: Option<RadiationBoard>,
    /// Incoming per-label board, when registered.
    pub incoming_board: Option<IncomingBoard>,
    /// Per-radius interior/exterior series, in registration order.
    pub radius_watch: Vec<RadiusSeries>,
    /// State at the final time.
    pub final_state: FieldState,
}

impl Trajectory {
    /// Snapshot taken at time `t`.
    pub fn snapshot_at(&self, t: f64) -> Result<&FieldState> {
        self.snapshots
            .iter()
            .find(|s| math::abs(s.t - t) <= 1e-9 * (1.0 + math::abs(t)))
            .ok_or_else(|| {
                Error::MissingProbe(format!("no snapshot was registered at t = {t}"))
            })
    }

    /// Registered trace with the given kind and label.
    pub fn trace(&self, kind: TraceKind, label: f64) -> Result<&CharacteristicTrace> {
        self.traces
            .iter()
            .find(|tr| tr.kind == kind && math::abs(tr.label - label) <= 1e-9 * (1.0 + math::abs(label)))
            .ok_or_else(|| {
                Error::MissingProbe(format!("no trace was registered at label {label}"))
            })
    }

    /// Ledger of a registered region.
    pub fn region_ledger(&self, region: &PolygonRegion) -> Option<&RegionLedger> {
        self.region_ledgers.iter().find(|l| &l.region == region)
    }

    /// Watched-radius series at radius `r`.
    pub fn radius_series(&self, r: f64) -> Result<&RadiusSeries> {
        self.radius_watch
            .iter()
            .find(|s| math::abs(s.radius - r) <= 1e-9 * (1.0 + math::abs(r)))
            .ok_or_else(|| Error::MissingProbe(format!("radius {r} was not watched")))
    }

    /// ∬ |w|^{p+1}/r^p dr dt over the whole run (trapezoid in both
    /// directions).
    pub fn spacetime_weight_rp(&self) -> f64 {
        math::trapezoid(&self.energy_series.weight_rp, self.grid.dt())
    }

    /// Energy at t = 0.
    pub fn initial_energy(&self) -> f64 {
        self.energy_series.total[0]
    }
}

/// A forward run paired with the run of the time-reversed data, realizing
/// the two-sided horizon [−T, T]: negative times of the original solution
/// are positive times of the reversed flow.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedTrajectory {
    /// The run of the original data over [0, T].
    pub forward: Trajectory,
    /// The run of the time-reversed data over [0, T] (original [−T, 0]).
    pub backward: Trajectory,
}

// ───────────────────────── internal recorder ─────────────────────────

struct TraceAcc {
    kind: TraceKind,
    label_index: i64,
    times: Vec<f64>,
    invariant: Vec<f64>,
    co_invariant: Vec<f64>,
    w: Vec<f64>,
    source_integral: Vec<f64>,
    prev_source: Option<f64>,
}

struct BoardAcc {
    last_value: Vec<f64>,
    last_time: Vec<f64>,
    flux_pot: Vec<f64>,
    weight_rp: Vec<f64>,
    weight_mixed: Vec<f64>,
    prev: Vec<(f64, f64, f64)>,
    seen: Vec<bool>,
}

struct InBoardAcc {
    last_value: Vec<f64>,
    last_time: Vec<f64>,
    flux_pot: Vec<f64>,
    prev: Vec<f64>,
    seen: Vec<bool>,
}

struct RegionAcc {
    region: PolygonRegion,
    inward_sides: Vec<f64>,
    outward_sides: Vec<f64>,
    bulk: f64,
}

pub(crate) struct Recorder {
    grid: GridSpec,
    params: ModelParams,
    coeff: f64,
    p: f64,
    // scratch, refilled every step
    pot1: Vec<f64>,
    rp: Vec<f64>,
    pref_kinpot: Vec<f64>,
    pref_pot1: Vec<f64>,
    pref_rp: Vec<f64>,
    pref_phi2: Vec<f64>,
    pref_psi2: Vec<f64>,
    // outputs
    energy: EnergySeries,
    origin: OriginSeries,
    snapshots: Vec<FieldState>,
    snapshot_steps: Vec<usize>,
    snapshot_stride: Option<usize>,
    traces: Vec<TraceAcc>,
    regions: Vec<RegionAcc>,
    board: Option<BoardAcc>,
    in_board: Option<InBoardAcc>,
    watch: Vec<RadiusSeries>,
}

impl Recorder {
    pub(crate) fn new(grid: &GridSpec, params: &ModelParams, probes: &ProbeSet) -> Result<Self> {
        let n = grid.n_r() + 1;
        let steps = grid.n_steps();

        let mut traces = Vec::new();
        for &label in &probes.outgoing_traces {
            traces.push(TraceAcc::new(TraceKind::Outgoing, grid.label_index(label)?));
        }
        for &label in &probes.incoming_traces {
            let k = grid.label_index(label)?;
            if k < 0 {
                return Err(Error::Config(format!(
                    "incoming label s = {label} is negative; the line never enters the grid"
                )));
            }
            traces.push(TraceAcc::new(TraceKind::Incoming, k));
        }

        let mut snapshot_steps = Vec::new();
        for &t in &probes.snapshot_times {
            snapshot_steps.push(grid.time_index(t)?);
        }
        snapshot_steps.sort_unstable();
        snapshot_steps.dedup();

        let mut regions = Vec::new();
        for region in &probes.regions {
            let (lo, hi) = region.row_range();
            if lo < 0 || hi as usize > steps || region.max_radius() as usize > grid.n_r() {
                return Err(Error::Config(
                    "region extends beyond the computed space-time domain".into(),
                ));
            }
            let sides = region.sides().len();
            regions.push(RegionAcc {
                region: region.clone(),
                inward_sides: alloc::vec![0.0; sides],
                outward_sides: alloc::vec![0.0; sides],
                bulk: 0.0,
            });
        }

        let label_count = grid.n_r() + steps + 1;
        let board = probes.radiation_board.then(|| BoardAcc::new(label_count));
        let in_board = probes.incoming_board.then(|| InBoardAcc::new(label_count));

        let mut watch = Vec::new();
        for &r in &probes.watch_radii {
            let index = grid.radius_index(r)?;
            if index == 0 {
                return Err(Error::Config("watched radius must be positive".into()));
            }
            watch.push(RadiusSeries {
                radius: grid.radius(index),
                index,
                u_sq: Vec::with_capacity(steps + 1),
                interior_wform: Vec::with_capacity(steps + 1),
                interior_pot: Vec::with_capacity(steps + 1),
                exterior_rp: Vec::with_capacity(steps + 1),
                phi_sq: Vec::with_capacity(steps + 1),
                psi_sq: Vec::with_capacity(steps + 1),
                pot_point: Vec::with_capacity(steps + 1),
            });
        }

        Ok(Self {
            grid: *grid,
            params: *params,
            coeff: params.potential_coefficient(),
            p: params.exponent().unwrap_or(0.0),
            pot1: alloc::vec![0.0; n],
            rp: alloc::vec![0.0; n],
            pref_kinpot: alloc::vec![0.0; n],
            pref_pot1: alloc::vec![0.0; n],
            pref_rp: alloc::vec![0.0; n],
            pref_phi2: alloc::vec![0.0; n],
            pref_psi2: alloc::vec![0.0; n],
            energy: EnergySeries {
                dt: grid.dt(),
                total: Vec::with_capacity(steps + 1),
                inward: Vec::with_capacity(steps + 1),
                outward: Vec::with_capacity(steps + 1),
                potential: Vec::with_capacity(steps + 1),
                weight_rp: Vec::with_capacity(steps + 1),
            },
            origin: OriginSeries {
                dt: grid.dt(),
                first: Vec::with_capacity(steps + 1),
                richardson: Vec::with_capacity(steps + 1),
            },
            snapshots: Vec::new(),
            snapshot_steps,
            snapshot_stride: probes.snapshot_stride,
            traces,
            regions,
            board,
            in_board,
            watch,
        })
    }

    /// Record all probes for the state at step `n`; returns the total energy
    /// so the caller can check finiteness.
    pub(crate) fn record(&mut self, n: usize, state: &FieldState) -> f64 {
        let grid = self.grid;
        let dr = grid.dr();
        let dt = grid.dt();
        let last = grid.n_r();
        let pi = core::f64::consts::PI;
        let linear = self.params.is_linear();

        // Point densities and trapezoid prefixes.
        self.pot1[0] = 0.0;
        self.rp[0] = 0.0;
        if !linear {
            for i in 1..=last {
                let r = grid.radius(i);
                let a = math::abs_pow(state.w[i], self.p + 1.0) / math::abs_pow(r, self.p);
                self.rp[i] = a;
                self.pot1[i] = a * r;
            }
        }
        self.pref_kinpot[0] = 0.0;
        self.pref_pot1[0] = 0.0;
        self.pref_rp[0] = 0.0;
        self.pref_phi2[0] = 0.0;
        self.pref_psi2[0] = 0.0;
        let mut prev_kinpot = 0.5 * (state.phi[0] * state.phi[0] + state.psi[0] * state.psi[0]);
        let mut prev_phi2 = state.phi[0] * state.phi[0];
        let mut prev_psi2 = state.psi[0] * state.psi[0];
        if linear {
            // pot1/rp and their prefixes stay zero; only the kinetic
            // prefixes move.
            for i in 1..=last {
                let phi2 = state.phi[i] * state.phi[i];
                let psi2 = state.psi[i] * state.psi[i];
                let kinpot = 0.5 * (phi2 + psi2);
                self.pref_kinpot[i] =
                    self.pref_kinpot[i - 1] + 0.5 * dr * (prev_kinpot + kinpot);
                self.pref_phi2[i] = self.pref_phi2[i - 1] + 0.5 * dr * (prev_phi2 + phi2);
                self.pref_psi2[i] = self.pref_psi2[i - 1] + 0.5 * dr * (prev_psi2 + psi2);
                prev_kinpot = kinpot;
                prev_phi2 = phi2;
                prev_psi2 = psi2;
            }
        } else {
            for i in 1..=last {
                let phi2 = state.phi[i] * state.phi[i];
                let psi2 = state.psi[i] * state.psi[i];
                let kinpot = 0.5 * (phi2 + psi2) + self.coeff * self.pot1[i];
                self.pref_kinpot[i] =
                    self.pref_kinpot[i - 1] + 0.5 * dr * (prev_kinpot + kinpot);
                self.pref_pot1[i] =
                    self.pref_pot1[i - 1] + 0.5 * dr * (self.pot1[i - 1] + self.pot1[i]);
                self.pref_rp[i] = self.pref_rp[i - 1] + 0.5 * dr * (self.rp[i - 1] + self.rp[i]);
                self.pref_phi2[i] = self.pref_phi2[i - 1] + 0.5 * dr * (prev_phi2 + phi2);
                self.pref_psi2[i] = self.pref_psi2[i - 1] + 0.5 * dr * (prev_psi2 + psi2);
                prev_kinpot = kinpot;
                prev_phi2 = phi2;
                prev_psi2 = psi2;
            }
        }

        // Energy series.
        let e_total = 2.0 * pi * self.pref_kinpot[last];
        let pot_int = self.pref_pot1[last];
        self.energy.total.push(e_total);
        self.energy
            .inward
            .push(pi * (self.pref_phi2[last] + self.coeff * pot_int));
        self.energy
            .outward
            .push(pi * (self.pref_psi2[last] + self.coeff * pot_int));
        self.energy.potential.push(2.0 * pi * self.coeff * pot_int);
        self.energy.weight_rp.push(self.pref_rp[last]);

        // Origin estimates.
        let u1 = state.w[1] / dr;
        let u2 = state.w[2] / (2.0 * dr);
        self.origin.first.push(u1);
        self.origin.richardson.push(2.0 * u1 - u2);

        // Snapshots.
        let stride_hit = self
            .snapshot_stride
            .map(|s| s > 0 && n % s == 0)
            .unwrap_or(false);
        if stride_hit || self.snapshot_steps.binary_search(&n).is_ok() {
            self.snapshots.push(state.clone());
        }

        // Traces.
        let t_now = grid.time(n);
        for trace in &mut self.traces {
            let i = match trace.kind {
                TraceKind::Outgoing => n as i64 - trace.label_index,
                TraceKind::Incoming => trace.label_index - n as i64,
            };
            if i < 0 || i as usize > last {
                continue;
            }
            let i = i as usize;
            let source = nonlinearity(state.w[i], grid.radius(i), &self.params);
            let running = match trace.prev_source {
                Some(prev) => {
                    trace.source_integral.last().unwrap() + 0.5 * dt * (prev + source)
                }
                None => 0.0,
            };
            let (inv, co) = match trace.kind {
                TraceKind::Outgoing => (state.psi[i], state.phi[i]),
                TraceKind::Incoming => (state.phi[i], state.psi[i]),
            };
            trace.times.push(t_now);
            trace.invariant.push(inv);
            trace.co_invariant.push(co);
            trace.w.push(state.w[i]);
            trace.source_integral.push(running);
            trace.prev_source = Some(source);
        }

        // Outgoing board: labels k = n − i.
        if let Some(board) = &mut self.board {
            let n_i = n as i64;
            let offset = grid.n_r() as i64; // slot = k + n_r
            for i in 0..=last {
                let slot = (n_i - i as i64 + offset) as usize;
                let r = grid.radius(i);
                let q = 2.0 * pi * self.coeff * self.pot1[i];
                let m = self.rp[i];
                let j = if i == 0 || linear {
                    0.0
                } else {
                    math::abs_pow(state.w[i], self.p) / math::abs_pow(r, self.p - 1.0)
                };
                if board.seen[slot] {
                    let (pq, pm, pj) = board.prev[slot];
                    board.flux_pot[slot] += 0.5 * dt * (pq + q);
                    board.weight_rp[slot] += 0.5 * dt * (pm + m);
                    board.weight_mixed[slot] += 0.5 * dt * (pj + j);
                } else {
                    board.seen[slot] = true;
                }
                board.prev[slot] = (q, m, j);
                board.last_value[slot] = state.psi[i];
                board.last_time[slot] = t_now;
            }
        }

        // Incoming board: labels k = n + i.
        if let Some(board) = &mut self.in_board {
            let n_i = n as i64;
            for i in 0..=last {
                let slot = (n_i + i as i64) as usize;
                let q = 2.0 * pi * self.coeff * self.pot1[i];
                if board.seen[slot] {
                    board.flux_pot[slot] += 0.5 * dt * (board.prev[slot] + q);
                } else {
                    board.seen[slot] = true;
                }
                board.prev[slot] = q;
                board.last_value[slot] = state.phi[i];
                board.last_time[slot] = t_now;
            }
        }

        // Watched radii.
        for series in &mut self.watch {
            let m = series.index;
            let u = state.w[m] / series.radius;
            series.u_sq.push(u * u);
            series.interior_wform.push(2.0 * pi * self.pref_kinpot[m]);
            series.interior_pot.push(self.pref_pot1[m]);
            series
                .exterior_rp
                .push(self.pref_rp[last] - self.pref_rp[m]);
            series.phi_sq.push(state.phi[m] * state.phi[m]);
            series.psi_sq.push(state.psi[m] * state.psi[m]);
            series.pot_point.push(self.pot1[m]);
        }

        // Regions.
        let mu_density = {
            let k = self.origin.richardson.len() - 1;
            self.origin.density(k)
        };
        let n_row = n as i64;
        for acc in &mut self.regions {
            let (row_lo, row_hi) = acc.region.row_range();
            if n_row < row_lo || n_row > row_hi {
                continue;
            }
            // Bulk: trapezoid in t of the row integrals.
            let row_weight = if n_row == row_lo || n_row == row_hi {
                0.5
            } else {
                1.0
            };
            let mut row_integral = 0.0;
            for (a, b) in acc.region.row_intervals(n_row) {
                row_integral += self.pref_rp[b as usize] - self.pref_rp[a as usize];
            }
            acc.bulk += row_weight * row_integral * dt;

            // Sides.
            for (side_idx, side) in acc.region.sides().iter().enumerate() {
                match side.orient {
                    SideOrient::Horizontal => {
                        if side.from.1 != n_row {
                            continue;
                        }
                        let (a, b) = if side.from.0 < side.to.0 {
                            (side.from.0 as usize, side.to.0 as usize)
                        } else {
                            (side.to.0 as usize, side.from.0 as usize)
                        };
                        let sign = if side.to.0 > side.from.0 { 1.0 } else { -1.0 };
                        let pot = self.coeff * (self.pref_pot1[b] - self.pref_pot1[a]);
                        acc.inward_sides[side_idx] =
                            sign * (self.pref_phi2[b] - self.pref_phi2[a] + pot);
                        acc.outward_sides[side_idx] =
                            sign * (self.pref_psi2[b] - self.pref_psi2[a] + pot);
                    }
                    SideOrient::Vertical => {
                        let (lo, hi) = side.rows();
                        if n_row < lo || n_row > hi {
                            continue;
                        }
                        let wt = if n_row == lo || n_row == hi { 0.5 } else { 1.0 };
                        let sign = if side.to.1 > side.from.1 { 1.0 } else { -1.0 };
                        let i = side.from.0 as usize;
                        let v = self.coeff * self.pot1[i];
                        let phi2 = state.phi[i] * state.phi[i];
                        let psi2 = state.psi[i] * state.psi[i];
                        acc.inward_sides[side_idx] += sign * wt * dt * (phi2 - v);
                        acc.outward_sides[side_idx] += sign * wt * dt * (v - psi2);
                    }
                    SideOrient::Axis => {
                        let (lo, hi) = side.rows();
                        if n_row < lo || n_row > hi {
                            continue;
                        }
                        let wt = if n_row == lo || n_row == hi { 0.5 } else { 1.0 };
                        acc.inward_sides[side_idx] += -wt * dt * mu_density;
                        acc.outward_sides[side_idx] += wt * dt * mu_density;
                    }
                    SideOrient::IncomingChar => {
                        let (lo, hi) = side.rows();
                        if n_row < lo || n_row > hi {
                            continue;
                        }
                        let wt = if n_row == lo || n_row == hi { 0.5 } else { 1.0 };
                        let sign = if side.to.0 > side.from.0 { 1.0 } else { -1.0 };
                        let i = side.radius_at_row(n_row) as usize;
                        let v = self.coeff * self.pot1[i];
                        let psi2 = state.psi[i] * state.psi[i];
                        acc.inward_sides[side_idx] += sign * wt * dt * 2.0 * v;
                        acc.outward_sides[side_idx] += sign * wt * dt * 2.0 * psi2;
                    }
                    SideOrient::OutgoingChar => {
                        let (lo, hi) = side.rows();
                        if n_row < lo || n_row > hi {
                            continue;
                        }
                        let wt = if n_row == lo || n_row == hi { 0.5 } else { 1.0 };
                        let sign = if side.to.1 > side.from.1 { 1.0 } else { -1.0 };
                        let i = side.radius_at_row(n_row) as usize;
                        let v = self.coeff * self.pot1[i];
                        let phi2 = state.phi[i] * state.phi[i];
                        acc.inward_sides[side_idx] += sign * wt * dt * 2.0 * phi2;
                        acc.outward_sides[side_idx] += sign * wt * dt * 2.0 * v;
                    }
                }
            }
        }

        e_total
    }

    pub(crate) fn finish(self, final_state: FieldState) -> Trajectory {
        let dt = self.grid.dt();
        Trajectory {
            grid: self.grid,
            params: self.params,
            energy_series: self.energy,
            origin_series: self.origin,
            snapshots: self.snapshots,
            traces: self
                .traces
                .into_iter()
                .map(|acc| CharacteristicTrace {
                    kind: acc.kind,
                    label: acc.label_index as f64 * dt,
                    label_index: acc.label_index,
                    times: acc.times,
                    invariant: acc.invariant,
                    co_invariant: acc.co_invariant,
                    w: acc.w,
                    source_integral: acc.source_integral,
                })
                .collect(),
            region_ledgers: self
                .regions
                .into_iter()
                .map(|acc| RegionLedger {
                    region: acc.region,
                    inward_sides: acc.inward_sides,
                    outward_sides: acc.outward_sides,
                    bulk: acc.bulk,
                })
                .collect(),
            outgoing_board: self.board.map(|b| RadiationBoard {
                dt,
                min_label: -(self.grid.n_r() as i64),
                last_value: b.last_value,
                last_time: b.last_time,
                flux_pot: b.flux_pot,
                weight_rp: b.weight_rp,
                weight_mixed: b.weight_mixed,
            }),
            incoming_board: self.in_board.map(|b| IncomingBoard {
                dt,
                last_value: b.last_value,
                last_time: b.last_time,
                flux_pot: b.flux_pot,
            }),
            radius_watch: self.watch,
            final_state,
        }
    }
}

impl TraceAcc {
    fn new(kind: TraceKind, label_index: i64) -> Self {
        Self {
            kind,
            label_index,
            times: Vec::new(),
            invariant: Vec::new(),
            co_invariant: Vec::new(),
            w: Vec::new(),
            source_integral: Vec::new(),
            prev_source: None,
        }
    }
}

impl BoardAcc {
    fn new(labels: usize) -> Self {
        Self {
            last_value: alloc::vec![0.0; labels],
            last_time: alloc::vec![0.0; labels],
            flux_pot: alloc::vec![0.0; labels],
            weight_rp: alloc::vec![0.0; labels],
            weight_mixed: alloc::vec![0.0; labels],
            prev: alloc::vec![(0.0, 0.0, 0.0); labels],
            seen: alloc::vec![false; labels],
        }
    }
}

impl InBoardAcc {
    fn new(labels: usize) -> Self {
        Self {
            last_value: alloc::vec![0.0; labels],
            last_time: alloc::vec![0.0; labels],
            flux_pot: alloc::vec![0.0; labels],
            prev: alloc::vec![0.0; labels],
            seen: alloc::vec![false; labels],
        }
    }
}
