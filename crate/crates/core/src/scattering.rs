//! Radiation-field extraction and the scattering diagnostics built on it.
//!
//! Along outgoing characteristics the invariant ψ = w_r − w_t settles to a
//! label function g₊(τ) at the rate (t−τ)^{−(p−2)/(p+1)}; the time-reversed
//! flow provides g₋(s) the same way. The L² masses Ẽ± = π∫|g±|² are the
//! scattered energies, the reduced free waves V± built from g± are the
//! scattering targets, and the comparison of (w_r, w_t) with (V_r, V_t)
//! outside moving light cones quantifies the convergence. The weighted
//! exterior energy and the retarded/escaping-energy ledger assemble the
//! ingredients of the decay-implies-scattering argument.

use alloc::format;
use alloc::vec::Vec;

use crate::dalembert::FreePoint;
use crate::energy::partition_energies;
use crate::error::{Error, Result};
use crate::math;
use crate::params::{critical_exponents, ModelParams};
use crate::state::FieldState;
use crate::trajectory::{Trajectory, TwoSidedTrajectory};

/// Labels below this time span since their characteristic entered the grid
/// are flagged as weakly converged.
pub const MIN_EXTRACTION_SPAN: f64 = 1.0;

/// Which radiation field a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiationKind {
    /// g₊(τ): the t → +∞ limit of ψ along t − r = τ, from a forward run.
    GPlus,
    /// g₋(s): the t → −∞ limit of φ along t + r = s, realized as the g₊
    /// extraction of the time-reversed run with labels s = −τ̃.
    GMinus,
}

/// Extracted radiation field on the label lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationProfile {
    /// Field kind.
    pub kind: RadiationKind,
    /// Label spacing (the run's time step).
    pub spacing: f64,
    /// Ascending labels (τ or s).
    pub labels: Vec<f64>,
    /// Extracted g values, one per label.
    pub values: Vec<f64>,
    /// Time at which each value was read.
    pub extraction_times: Vec<f64>,
    /// Error envelope C(τ)·span^{−(p−2)/(p+1)} per label (0 in linear mode).
    pub error_estimates: Vec<f64>,
    /// True for labels whose extraction span is below [`MIN_EXTRACTION_SPAN`].
    pub flagged: Vec<bool>,
    /// Scattered energy Ẽ = π Σ |g|² Δlabel.
    pub scattered_energy: f64,
}

impl RadiationProfile {
    /// g at an arbitrary label (linear interpolation, zero outside).
    pub fn value_at(&self, label: f64) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        math::sample_linear(&self.values, self.spacing, label - self.labels[0])
    }

    /// ∫ g(y) dy over [a, b], zero-extended outside the label range.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if self.labels.is_empty() || b <= a {
            return 0.0;
        }
        let lo = self.labels[0];
        math::clipped_trapezoid(&self.values, self.spacing, a - lo, b - lo)
    }

    /// π ∫ |g|² over a label window (trapezoid).
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if self.labels.is_empty() || b <= a {
            return 0.0;
        }
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        core::f64::consts::PI
            * math::clipped_trapezoid(&sq, self.spacing, a - self.labels[0], b - self.labels[0])
    }
}

/// Extract the radiation field from a run's outgoing board.
///
/// `kind` fixes the label convention: `GPlus` keeps the run's own τ labels;
/// `GMinus` interprets the run as the time-reversed flow and returns labels
/// s = −τ̃ in ascending order. `label_range` restricts the returned lattice.
pub fn extract_g(
    trajectory: &Trajectory,
    kind: RadiationKind,
    label_range: Option<(f64, f64)>,
) -> Result<RadiationProfile> {
    let board = trajectory
        .outgoing_board
        .as_ref()
        .ok_or_else(|| Error::MissingProbe("the run did not record the radiation board".into()))?;
    let params = &trajectory.params;
    let p = params.exponent();
    let decay = p.map(|p| (p - 2.0) / (p + 1.0)).unwrap_or(0.0);
    let pi = core::f64::consts::PI;

    let n_labels = board.len();
    let mut labels = Vec::with_capacity(n_labels);
    let mut values = Vec::with_capacity(n_labels);
    let mut times = Vec::with_capacity(n_labels);
    let mut errors = Vec::with_capacity(n_labels);
    let mut flagged = Vec::with_capacity(n_labels);
    for idx in 0..n_labels {
        let tau = board.label(idx);
        let label = match kind {
            RadiationKind::GPlus => tau,
            RadiationKind::GMinus => -tau,
        };
        if let Some((lo, hi)) = label_range {
            if label < lo - 1e-12 || label > hi + 1e-12 {
                continue;
            }
        }
        let span = board.last_time[idx] - tau;
        let error = match p {
            Some(p) if span > 0.0 => {
                let c = math::powf((p + 1.0) * board.flux_pot[idx] / (4.0 * pi), p / (p + 1.0))
                    * math::powf(p - 2.0, -1.0 / (p + 1.0));
                c * math::powf(span, -decay)
            }
            _ => 0.0,
        };
        labels.push(label);
        values.push(board.last_value[idx]);
        times.push(board.last_time[idx]);
        errors.push(error);
        flagged.push(span < MIN_EXTRACTION_SPAN);
    }
    if matches!(kind, RadiationKind::GMinus) {
        labels.reverse();
        values.reverse();
        times.reverse();
        errors.reverse();
        flagged.reverse();
    }
    let scattered_energy =
        pi * math::trapezoid(&values.iter().map(|v| v * v).collect::<Vec<_>>(), board.dt);
    Ok(RadiationProfile {
        kind,
        spacing: board.dt,
        labels,
        values,
        extraction_times: times,
        error_estimates: errors,
        flagged,
        scattered_energy,
    })
}

/// Result of fitting the convergence rate of a trace toward its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Fitted decay exponent α in |ψ(t) − g| ≈ C (t−τ)^{−α}.
    pub exponent: f64,
    /// Fitted amplitude C.
    pub amplitude: f64,
    /// Number of samples used.
    pub points: usize,
    /// True when the differences sit at rounding level and no rate can be
    /// measured; counts as converged.
    pub below_noise_floor: bool,
}

/// Fit the power-law approach of the outgoing invariant to its extracted
/// limit over the absolute-time window `[t_lo, t_hi]`.
pub fn decay_fit(trajectory: &Trajectory, label: f64, window: (f64, f64)) -> Result<DecayFit> {
    let trace = trajectory.trace(crate::trajectory::TraceKind::Outgoing, label)?;
    let (t_lo, t_hi) = window;
    if t_hi <= t_lo {
        return Err(Error::Config(format!(
            "decay window needs t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let limit = *trace.invariant.last().unwrap();
    let scale = trace
        .invariant
        .iter()
        .fold(0.0f64, |m, v| m.max(math::abs(*v)))
        .max(1e-300);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut in_window = 0usize;
    for (j, &t) in trace.times.iter().enumerate() {
        if t < t_lo || t > t_hi {
            continue;
        }
        in_window += 1;
        let diff = math::abs(trace.invariant[j] - limit);
        let span = t - label;
        if span <= 0.0 || diff < 1e-13 * scale {
            continue;
        }
        xs.push(math::ln(span));
        ys.push(math::ln(diff));
    }
    if in_window < 4 {
        return Err(Error::Config(
            "decay window covers fewer than 4 trace samples".into(),
        ));
    }
    if xs.len() < in_window / 5 {
        // Almost all differences at rounding level: converged below noise.
        return Ok(DecayFit {
            exponent: f64::INFINITY,
            amplitude: 0.0,
            points: xs.len(),
            below_noise_floor: true,
        });
    }
    let (slope, intercept) = math::linear_fit(&xs, &ys)
        .ok_or_else(|| Error::Config("degenerate decay fit".into()))?;
    Ok(DecayFit {
        exponent: -slope,
        amplitude: math::exp(intercept),
        points: xs.len(),
        below_noise_floor: false,
    })
}

/// Evaluate the reduced free wave V(r, t) = ½∫_{t−r}^{t+r} g with its
/// derivatives V_r = ½(g(t+r) + g(t−r)), V_t = ½(g(t+r) − g(t−r)).
///
/// g is extended by zero outside its labels. For a `GPlus` profile the
/// outgoing invariant V_r − V_t reproduces g₊(t−r); for `GMinus` the
/// incoming invariant V_r + V_t reproduces g₋(t+r).
pub fn free_wave_eval(profile: &RadiationProfile, r: f64, t: f64) -> FreePoint {
    let g_hi = profile.value_at(t + r);
    let g_lo = profile.value_at(t - r);
    FreePoint {
        w: 0.5 * profile.integral(t - r, t + r),
        w_r: 0.5 * (g_hi + g_lo),
        w_t: 0.5 * (g_hi - g_lo),
    }
}

/// L² mismatch 2π ∫_exterior (|w_r − V_r|² + |w_t − V_t|²) dr between the
/// run state at time `t` and the free wave of `profile`.
///
/// For `GPlus` the exterior is {r > t − anchor} with anchor = τ₀ on the
/// forward run. For `GMinus` pass the reversed run and anchor = s₀; the
/// exterior is {r > s₀ + t} and the comparison happens at original time −t,
/// where the reversed state carries w_t with the opposite sign.
pub fn exterior_difference(
    trajectory: &Trajectory,
    profile: &RadiationProfile,
    anchor: f64,
    t: f64,
) -> Result<f64> {
    let state = trajectory.snapshot_at(t)?;
    let (r_low, original_time, flip_wt) = match profile.kind {
        RadiationKind::GPlus => (t - anchor, t, 1.0),
        RadiationKind::GMinus => (anchor + t, -t, -1.0),
    };
    let n = state.len();
    let mut mismatch = alloc::vec![0.0; n];
    for i in 0..n {
        let r = state.radius(i);
        let v = free_wave_eval(profile, r, original_time);
        let dr_ = state.w_r(i) - v.w_r;
        let dt_ = flip_wt * state.w_t(i) - v.w_t;
        mismatch[i] = dr_ * dr_ + dt_ * dt_;
    }
    let start = r_low.max(0.0);
    Ok(2.0 * core::f64::consts::PI
        * math::clipped_trapezoid(&mismatch, state.dr, start, state.radius(n - 1)))
}

/// Energy split across the retarded annulus at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusReport {
    /// Time |t| the split refers to.
    pub t: f64,
    /// Inner edge c|t|.
    pub inner_radius: f64,
    /// Outer edge |t| − |t|^β.
    pub outer_radius: f64,
    /// Full energy in [0, c|t|].
    pub inner: f64,
    /// Full energy in the annulus [c|t|, |t| − |t|^β].
    pub annulus: f64,
    /// Full energy beyond |t| − |t|^β (to the grid edge).
    pub exterior: f64,
}

/// Full-energy split at radii c|t| and |t| − |t|^β.
pub fn annulus_energy(
    state: &FieldState,
    c: f64,
    beta: f64,
    params: &ModelParams,
) -> Result<AnnulusReport> {
    if !(0.0 < c && c < 1.0) {
        return Err(Error::Domain(format!("annulus speed c = {c} must lie in (0, 1)")));
    }
    let beta_sup = critical_exponents(params)?.beta_sup;
    if !(0.0 < beta && beta < beta_sup) {
        return Err(Error::Domain(format!(
            "retardation exponent beta = {beta} must lie in (0, {beta_sup})"
        )));
    }
    let t = math::abs(state.t);
    let inner_radius = c * t;
    let outer_radius = t - math::powf(t, beta);
    if inner_radius >= outer_radius {
        let min_t = math::powf(1.0 / (1.0 - c), 1.0 / (1.0 - beta));
        return Err(Error::Config(format!(
            "annulus is empty at |t| = {t}: c|t| = {inner_radius} >= |t| − |t|^β = {outer_radius}; need |t| > {min_t}"
        )));
    }
    let r_max = state.radius(state.len() - 1);
    let inner = partition_energies(state, 0.0, inner_radius, params)?.total;
    let annulus = partition_energies(state, inner_radius, outer_radius, params)?.total;
    let exterior = partition_energies(state, outer_radius, r_max, params)?.total;
    Ok(AnnulusReport {
        t,
        inner_radius,
        outer_radius,
        inner,
        annulus,
        exterior,
    })
}

/// Weighted exterior energy
/// I(t) = ∫_{|x|>|t|} (|x|−|t|)^κ e(u) dx
///      = 2π ∫_{|t|}^∞ (r−|t|)^κ [(w_r − w/r)² + w_t² + (2/(p+1))|w|^{p+1}/r^{p−1}] dr.
///
/// Nonincreasing in |t|; at t = 0 it is the decay functional of the
/// scattering hypothesis. κ = 0 degenerates to the plain exterior energy in
/// its 3D form.
pub fn weighted_energy(state: &FieldState, kappa: f64, params: &ModelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Domain(format!(
            "weight exponent kappa = {kappa} must lie in [0, 1]"
        )));
    }
    let coeff = params.potential_coefficient();
    let p = params.exponent().unwrap_or(3.0);
    let t = math::abs(state.t);
    let n = state.len();
    let mut dens = alloc::vec![0.0; n];
    for i in 0..n {
        let r = state.radius(i);
        if r <= t {
            continue;
        }
        let grad = state.w_r(i) - state.u(i);
        let wt = state.w_t(i);
        let pot = if i == 0 || coeff == 0.0 {
            0.0
        } else {
            coeff * math::abs_pow(state.w[i], p + 1.0) / math::abs_pow(r, p - 1.0)
        };
        let weight = if kappa == 0.0 {
            1.0
        } else {
            math::powf(r - t, kappa)
        };
        dens[i] = weight * (grad * grad + wt * wt + pot);
    }
    Ok(2.0 * core::f64::consts::PI
        * math::clipped_trapezoid(&dens, state.dr, t, state.radius(n - 1)))
}

/// Ledger comparing the retarded-energy contribution with the escaping-energy
/// ceiling at one radius R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Ledger {
    /// Radius R.
    pub radius: f64,
    /// Retardation exponent β (admissible: 1−κ < β < β₀(p)).
    pub beta: f64,
    /// Weight exponent κ (admissible: κ₀(p) < κ < 1).
    pub kappa: f64,
    /// Measured ∬_{|t|>R, |x|<R} e(u) over the horizon.
    pub raw_lhs: f64,
    /// Measured ∬_{|t|<R, |x|>R} e(u).
    pub raw_rhs: f64,
    /// Retarded lower-bound model (E − Ẽ₋)/2 · R^β.
    pub lhs_lower: f64,
    /// Escape upper bound 2/(1−κ) · R^{1−κ} · I.
    pub rhs_upper: f64,
    /// Weighted energy I of the data (κ-weighted, at t = 0).
    pub weighted_initial: f64,
    /// β − (1−κ) > 0: the growth-rate gap that forces scattering.
    pub exponent_gap: f64,
    /// E − Ẽ₋ used in the lower bound.
    pub retarded_energy: f64,
    /// True when the horizon reaches R + R^β, so the retarded window
    /// [−R−R^β, −R] that motivates `lhs_lower` is fully computed. The raw
    /// two sides only need horizon ≥ R.
    pub retarded_window_covered: bool,
}

/// Assemble the ledger at lattice radius `radius` over the two-sided run.
///
/// Needs the radius watched in both directions, a forward snapshot at t = 0
/// for the weighted energy, and the backward radiation board for Ẽ₋.
pub fn theorem2_ledger(
    run: &TwoSidedTrajectory,
    radius: f64,
    beta: f64,
    kappa: f64,
) -> Result<Theorem2Ledger> {
    let fwd = &run.forward;
    let rev = &run.backward;
    let params = &fwd.params;
    let exps = critical_exponents(params)?;
    if !(kappa > exps.kappa_inf && kappa < 1.0) {
        return Err(Error::Domain(format!(
            "kappa = {kappa} outside the admissible interval ({}, 1)",
            exps.kappa_inf
        )));
    }
    if !(beta > 1.0 - kappa && beta < exps.beta_sup) {
        return Err(Error::Domain(format!(
            "beta = {beta} outside the admissible interval ({}, {})",
            1.0 - kappa,
            exps.beta_sup
        )));
    }
    let grid = &fwd.grid;
    let t_end = grid.t_end();
    if radius > t_end {
        return Err(Error::InsufficientHorizon(format!(
            "ledger at R = {radius} needs horizon >= R, run has {t_end}"
        )));
    }
    let retarded_window_covered = t_end >= radius + math::powf(radius, beta);
    let steps = grid.n_steps();
    let dt = grid.dt();
    let fwd_r = fwd.radius_series(radius)?;
    let rev_r = rev.radius_series(radius)?;
    let n_split = grid.time_index(radius)?;

    let mut raw_lhs = 0.0;
    let mut raw_rhs = 0.0;
    for (traj, series) in [(fwd, fwd_r), (rev, rev_r)] {
        let interior: Vec<f64> = (0..=steps).map(|n| series.interior_3d(n)).collect();
        let exterior: Vec<f64> = (0..=steps)
            .map(|n| traj.energy_series.total[n] - series.interior_3d(n))
            .collect();
        raw_lhs += math::trapezoid(&interior[n_split..], dt);
        raw_rhs += math::trapezoid(&exterior[..=n_split], dt);
    }

    let initial = fwd.snapshot_at(0.0)?;
    let weighted_initial = weighted_energy(initial, kappa, params)?;
    let g_minus = extract_g(rev, RadiationKind::GMinus, None)?;
    let energy = fwd.initial_energy();
    let retarded_energy = (energy - g_minus.scattered_energy).max(0.0);

    Ok(Theorem2Ledger {
        radius,
        beta,
        kappa,
        raw_lhs,
        raw_rhs,
        lhs_lower: 0.5 * retarded_energy * math::powf(radius, beta),
        rhs_upper: 2.0 / (1.0 - kappa) * math::powf(radius, 1.0 - kappa) * weighted_initial,
        weighted_initial,
        exponent_gap: beta - (1.0 - kappa),
        retarded_energy,
        retarded_window_covered,
    })
}

/// One origin-throughput window check of the appendix bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCheck {
    /// Label window (τ1, τ2).
    pub window: (f64, f64),
    /// μ((τ1, τ2)) from the origin series.
    pub mu: f64,
    /// 2∫|g₊|² + 2∫J(τ)² dτ over the window.
    pub bound: f64,
}

/// Appendix report: change-of-variables identity, window bounds, and the
/// empirical interpolation constant.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixReport {
    /// Σ M(τ) Δτ over all labels.
    pub diagonal_sum: f64,
    /// ∬ |w|^{p+1}/r^p dr dt over the run (2D trapezoid).
    pub spacetime_integral: f64,
    /// Relative difference of the two routes (exact change of variables).
    pub change_of_variables_rel: f64,
    /// Per-window μ bounds.
    pub windows: Vec<WindowCheck>,
    /// Smallest constant C with J(τ) ≤ C·Q₊⁺(τ)^{2/(p+1)} M(τ)^{(p−2)/(p+1)}
    /// over all labels with nonvanishing Q, M.
    pub interpolation_constant: f64,
    /// Number of labels entering the interpolation constant.
    pub interpolation_labels: usize,
}

/// Verify the appendix inequalities on a forward run with a radiation board.
pub fn appendix_inequalities(
    trajectory: &Trajectory,
    profile: &RadiationProfile,
    windows: &[(f64, f64)],
) -> Result<AppendixReport> {
    let board = trajectory
        .outgoing_board
        .as_ref()
        .ok_or_else(|| Error::MissingProbe("the run did not record the radiation board".into()))?;
    if profile.kind != RadiationKind::GPlus {
        return Err(Error::Config(
            "appendix checks use the forward radiation field g₊".into(),
        ));
    }
    let p = trajectory
        .params
        .exponent()
        .ok_or_else(|| Error::Domain("appendix bounds need the defocusing model".into()))?;

    let diagonal_sum: f64 = board.weight_rp.iter().sum::<f64>() * board.dt;
    let spacetime_integral = trajectory.spacetime_weight_rp();
    let scale = spacetime_integral.max(1e-300);
    let change_of_variables_rel = math::abs(diagonal_sum - spacetime_integral) / scale;

    let mut checks = Vec::with_capacity(windows.len());
    for &(t1, t2) in windows {
        if t2 <= t1 {
            return Err(Error::Config(format!(
                "appendix window needs t1 < t2, got [{t1}, {t2}]"
            )));
        }
        let mu = crate::energy::mu_accumulate(trajectory, t1, t2)?;
        let g_mass = {
            let sq: Vec<f64> = profile.values.iter().map(|v| v * v).collect();
            math::clipped_trapezoid(&sq, profile.spacing, t1 - profile.labels[0], t2 - profile.labels[0])
        };
        let j_mass = {
            let sq: Vec<f64> = board.weight_mixed.iter().map(|v| v * v).collect();
            let lo = board.label(0);
            math::clipped_trapezoid(&sq, board.dt, t1 - lo, t2 - lo)
        };
        checks.push(WindowCheck {
            window: (t1, t2),
            mu,
            bound: 2.0 * g_mass + 2.0 * j_mass,
        });
    }

    let q_scale = board.flux_pot.iter().fold(0.0f64, |m, v| m.max(*v));
    let m_scale = board.weight_rp.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut constant: f64 = 0.0;
    let mut used = 0usize;
    for idx in 0..board.len() {
        let q = board.flux_pot[idx];
        let m = board.weight_rp[idx];
        let j = board.weight_mixed[idx];
        if q <= 1e-12 * q_scale || m <= 1e-12 * m_scale {
            continue;
        }
        let denom = math::powf(q, 2.0 / (p + 1.0)) * math::powf(m, (p - 2.0) / (p + 1.0));
        if denom > 0.0 {
            constant = constant.max(j / denom);
            used += 1;
        }
    }

    Ok(AppendixReport {
        diagonal_sum,
        spacetime_integral,
        change_of_variables_rel,
        windows: checks,
        interpolation_constant: constant,
        interpolation_labels: used,
    })
}
