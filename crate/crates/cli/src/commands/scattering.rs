//! `scattering`: extract the radiation fields, compare against the free-wave
//! targets outside moving cones, fit the convergence rate, localize the
//! annulus energies, evaluate the weighted exterior decay, and assemble the
//! retarded-vs-escaping ledgers and appendix bounds.

use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use radwave_core::{
    annulus_energy, appendix_inequalities, critical_exponents, decay_fit, exterior_difference,
    extract_g, theorem2_ledger, weighted_energy, RadiationKind,
};

use crate::config::ScenarioConfig;
use crate::report::{
    out_path, print_verdicts, write_json, write_radiation_csv, Metadata, Verdict,
};
use crate::scenario::Scenario;

/// Ceiling slack for the scattered energies.
const ENERGY_CEILING_TOL: f64 = 1e-6;
/// Required captured fraction Ẽ₊/E at the configured horizon.
const CAPTURE_MIN: f64 = 0.95;
/// Final exterior mismatch gate, relative to E.
const EXTERIOR_TOL: f64 = 0.05;
/// Slack, relative to I, for the weighted-energy monotonicity.
const WEIGHTED_TOL: f64 = 1e-3;

#[derive(Serialize)]
struct LedgerRow {
    radius: f64,
    beta: f64,
    kappa: f64,
    raw_lhs: f64,
    raw_rhs: f64,
    lhs_lower: f64,
    rhs_upper: f64,
    weighted_initial: f64,
    exponent_gap: f64,
    retarded_energy: f64,
}

#[derive(Serialize)]
struct AnnulusRow {
    t: f64,
    c: f64,
    beta: f64,
    inner: f64,
    annulus: f64,
    exterior: f64,
    retarded_estimate: f64,
}

#[derive(Serialize)]
struct ScatteringOut<'a> {
    metadata: Metadata,
    scenario: &'a ScenarioConfig,
    energy: f64,
    scattered_plus: f64,
    scattered_minus: f64,
    capture_ratio: f64,
    decay_exponent: Option<f64>,
    exterior_differences: Vec<(f64, f64)>,
    weighted_series: Vec<(f64, f64)>,
    annuli: Vec<AnnulusRow>,
    ledgers: Vec<LedgerRow>,
    appendix_change_of_variables_rel: Option<f64>,
    appendix_interpolation_constant: Option<f64>,
    verdicts: &'a [Verdict],
}

pub fn execute(scenario: &Scenario, out_dir: &Path, stamped: bool) -> anyhow::Result<bool> {
    let section = scenario
        .config
        .scattering
        .as_ref()
        .context("scattering needs a [scattering] section in the config")?;
    let params = &scenario.params;
    let exps = critical_exponents(params)
        .map_err(|e| anyhow::anyhow!("scattering diagnostics need the defocusing model: {e}"))?;

    // Probe plan: boards on both sides, snapshots at 0 and the comparison
    // times, the decay trace, and the ledger radii watched.
    let mut probes = scenario.probes(Vec::new());
    probes.radiation_board = true;
    probes.incoming_board = true;
    if !probes.snapshot_times.contains(&0.0) {
        probes.snapshot_times.push(0.0);
    }
    for &t in &section.comparison_times {
        if !probes.snapshot_times.contains(&t) {
            probes.snapshot_times.push(t);
        }
    }
    if !probes
        .outgoing_traces
        .iter()
        .any(|&l| (l - section.decay_label).abs() < 1e-12)
    {
        probes.outgoing_traces.push(section.decay_label);
    }
    for ledger in &scenario.config.ledgers {
        if !probes.watch_radii.iter().any(|&r| (r - ledger.r).abs() < 1e-12) {
            probes.watch_radii.push(ledger.r);
        }
    }
    let pair = scenario.run_two_sided(&probes, &probes)?;
    let fwd = &pair.forward;
    let e0 = fwd.initial_energy();

    let g_plus = extract_g(fwd, RadiationKind::GPlus, None).map_err(anyhow::Error::msg)?;
    let g_minus =
        extract_g(&pair.backward, RadiationKind::GMinus, None).map_err(anyhow::Error::msg)?;

    let mut verdicts = vec![
        Verdict::upper("scattered-energy-ceiling (+)", g_plus.scattered_energy, e0, ENERGY_CEILING_TOL),
        Verdict::upper("scattered-energy-ceiling (-)", g_minus.scattered_energy, e0, ENERGY_CEILING_TOL),
        Verdict::lower(
            "capture-ratio",
            g_plus.scattered_energy / e0,
            CAPTURE_MIN,
            0.0,
        ),
    ];

    // Decay-rate fit toward g₊; the required exponent is β₀/2 − 0.1,
    // i.e. (p−2)/(p+1) − 0.1.
    let fit = decay_fit(fwd, section.decay_label, (section.decay_window[0], section.decay_window[1]))
        .map_err(anyhow::Error::msg)?;
    let threshold = 0.5 * exps.beta_sup - 0.1;
    verdicts.push(Verdict::flag(
        "decay-exponent",
        if fit.below_noise_floor { f64::INFINITY } else { fit.exponent },
        threshold,
        fit.below_noise_floor || fit.exponent >= threshold,
    ));

    // Exterior mismatch against the free wave: strictly decreasing, small end.
    let mut exterior = Vec::new();
    for &t in &section.comparison_times {
        let value =
            exterior_difference(fwd, &g_plus, section.anchor, t).map_err(anyhow::Error::msg)?;
        exterior.push((t, value));
    }
    let decreasing = exterior.windows(2).all(|w| w[1].1 < w[0].1);
    verdicts.push(Verdict::flag(
        "exterior-difference-decreasing",
        exterior.last().map(|x| x.1).unwrap_or(0.0),
        exterior.first().map(|x| x.1).unwrap_or(0.0),
        decreasing,
    ));
    if let Some(&(_, last)) = exterior.last() {
        verdicts.push(Verdict::upper(
            "exterior-difference-final",
            last,
            EXTERIOR_TOL * e0,
            0.0,
        ));
    }

    // Weighted exterior energy along the run (first ledger's κ, else 0.6).
    let kappa = scenario
        .config
        .ledgers
        .first()
        .map(|l| l.kappa)
        .unwrap_or(0.6);
    let mut weighted = Vec::new();
    let mut times: Vec<f64> = probes.snapshot_times.clone();
    times.sort_by(f64::total_cmp);
    for &t in &times {
        let state = fwd.snapshot_at(t).map_err(anyhow::Error::msg)?;
        weighted.push((t, weighted_energy(state, kappa, params).map_err(anyhow::Error::msg)?));
    }
    let i0 = weighted.first().map(|x| x.1).unwrap_or(0.0);
    let monotone = weighted
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + WEIGHTED_TOL * i0);
    verdicts.push(Verdict::flag(
        "weighted-energy-nonincreasing",
        weighted.last().map(|x| x.1).unwrap_or(0.0),
        i0,
        monotone,
    ));

    // Annulus splits at comparison times, with the retarded-energy estimate
    // E − Ẽ₊ they converge to.
    let retarded_plus = (e0 - g_plus.scattered_energy).max(0.0);
    let mut annuli = Vec::new();
    for spec in &scenario.config.probes.annuli {
        for &t in &section.comparison_times {
            let Ok(state) = fwd.snapshot_at(t) else { continue };
            if let Ok(report) = annulus_energy(state, spec.c, spec.beta, params) {
                annuli.push(AnnulusRow {
                    t,
                    c: spec.c,
                    beta: spec.beta,
                    inner: report.inner,
                    annulus: report.annulus,
                    exterior: report.exterior,
                    retarded_estimate: retarded_plus,
                });
            }
        }
    }

    // Retarded-vs-escaping ledgers.
    let mut ledgers = Vec::new();
    for spec in &scenario.config.ledgers {
        let ledger = theorem2_ledger(&pair, spec.r, spec.beta, spec.kappa)
            .map_err(anyhow::Error::msg)?;
        verdicts.push(Verdict::upper(
            &format!("ledger-distribution R={}", spec.r),
            ledger.raw_lhs,
            ledger.raw_rhs,
            1e-9,
        ));
        verdicts.push(Verdict::upper(
            &format!("ledger-escape-ceiling R={}", spec.r),
            ledger.raw_rhs,
            ledger.rhs_upper,
            1e-2,
        ));
        verdicts.push(Verdict::lower(
            &format!("ledger-exponent-gap R={}", spec.r),
            ledger.exponent_gap,
            0.0,
            0.0,
        ));
        ledgers.push(LedgerRow {
            radius: ledger.radius,
            beta: ledger.beta,
            kappa: ledger.kappa,
            raw_lhs: ledger.raw_lhs,
            raw_rhs: ledger.raw_rhs,
            lhs_lower: ledger.lhs_lower,
            rhs_upper: ledger.rhs_upper,
            weighted_initial: ledger.weighted_initial,
            exponent_gap: ledger.exponent_gap,
            retarded_energy: ledger.retarded_energy,
        });
    }

    // Appendix bounds on the forward run.
    let mut change_rel = None;
    let mut interp = None;
    if !section.appendix_windows.is_empty() {
        let windows: Vec<(f64, f64)> = section
            .appendix_windows
            .iter()
            .map(|w| (w[0], w[1]))
            .collect();
        let report =
            appendix_inequalities(fwd, &g_plus, &windows).map_err(anyhow::Error::msg)?;
        verdicts.push(Verdict::upper(
            "appendix-change-of-variables",
            report.change_of_variables_rel,
            1e-6,
            0.0,
        ));
        for check in &report.windows {
            verdicts.push(Verdict::upper(
                &format!("appendix-throughput [{}, {}]", check.window.0, check.window.1),
                check.mu,
                check.bound,
                1e-6,
            ));
        }
        change_rel = Some(report.change_of_variables_rel);
        interp = Some(report.interpolation_constant);
        verdicts.push(Verdict::flag(
            "appendix-interpolation-finite",
            report.interpolation_constant,
            f64::INFINITY,
            report.interpolation_constant.is_finite(),
        ));
    }

    let formats = &scenario.config.output.formats;
    if formats.iter().any(|f| f == "csv") {
        write_radiation_csv(&out_path(out_dir, "g_plus.csv"), &g_plus)?;
        write_radiation_csv(&out_path(out_dir, "g_minus.csv"), &g_minus)?;
    }
    if formats.iter().any(|f| f == "json") {
        let report = ScatteringOut {
            metadata: Metadata::new(stamped),
            scenario: &scenario.config,
            energy: e0,
            scattered_plus: g_plus.scattered_energy,
            scattered_minus: g_minus.scattered_energy,
            capture_ratio: g_plus.scattered_energy / e0,
            decay_exponent: (!fit.below_noise_floor).then_some(fit.exponent),
            exterior_differences: exterior,
            weighted_series: weighted,
            annuli,
            ledgers,
            appendix_change_of_variables_rel: change_rel,
            appendix_interpolation_constant: interp,
            verdicts: &verdicts,
        };
        write_json(&out_path(out_dir, "scattering_report.json"), &report)?;
    }

    Ok(print_verdicts(&verdicts))
}
