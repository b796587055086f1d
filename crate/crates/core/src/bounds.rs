//! Pointwise a-priori bounds on the reduced field.
//!
//! Finite energy forces |w(r)| ≤ (E·r)^{1/2}; adding the potential part of
//! the energy improves this for large radii to
//! |w(r)| ≤ C_p·E^{2/(p+3)}·r^{(p−1)/(p+3)} with the explicit constant
//! C_p = 2^{2p/(p+3)} traced from the proof chain
//! E² ≳ S^{p+3}/(2^{2p} r^{p−1}). Both are upper envelopes: an evolved state
//! whose ratios exceed 1 (beyond tolerance) signals a defect.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;
use crate::params::ModelParams;
use crate::state::FieldState;

/// Tolerance added to 1 before a ratio counts as a violation; discretization
/// slack is on top of this in the caller's hands.
pub const BOUND_TOL: f64 = 1e-6;

/// Result of checking the two pointwise envelopes over a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// max over the grid of |wᵢ| / √(E·rᵢ).
    pub sqrt_ratio: f64,
    /// max of |wᵢ| / (C_p·E^{2/(p+3)}·rᵢ^{(p−1)/(p+3)}); `None` in linear
    /// mode, where the potential-energy ingredient is absent.
    pub refined_ratio: Option<f64>,
    /// Explicit constant C_p = 2^{2p/(p+3)} used for the refined envelope.
    pub constant: Option<f64>,
    /// True when either ratio exceeds 1 + [`BOUND_TOL`].
    pub violation: bool,
}

/// Evaluate both pointwise envelopes for a state of energy `energy`.
///
/// Errors when `energy <= 0` while the state is not identically zero.
pub fn pointwise_bound_report(
    state: &FieldState,
    energy: f64,
    params: &ModelParams,
) -> Result<BoundReport> {
    let peak = state.max_abs_w();
    if energy <= 0.0 {
        if peak == 0.0 {
            return Ok(BoundReport {
                sqrt_ratio: 0.0,
                refined_ratio: params.exponent().map(|_| 0.0),
                constant: params.exponent().map(constant_for),
                violation: false,
            });
        }
        return Err(Error::Inconsistent(format!(
            "nonzero state (max |w| = {peak}) with energy {energy} <= 0"
        )));
    }

    let mut sqrt_ratio: f64 = 0.0;
    for (i, &wv) in state.w.iter().enumerate().skip(1) {
        let r = state.radius(i);
        sqrt_ratio = sqrt_ratio.max(math::abs(wv) / math::sqrt(energy * r));
    }

    let refined = params.exponent().map(|p| {
        let cp = constant_for(p);
        let e_pow = math::powf(energy, 2.0 / (p + 3.0));
        let r_exp = (p - 1.0) / (p + 3.0);
        let mut ratio: f64 = 0.0;
        for (i, &wv) in state.w.iter().enumerate().skip(1) {
            let r = state.radius(i);
            ratio = ratio.max(math::abs(wv) / (cp * e_pow * math::powf(r, r_exp)));
        }
        ratio
    });

    let violation = sqrt_ratio > 1.0 + BOUND_TOL
        || refined.map(|r| r > 1.0 + BOUND_TOL).unwrap_or(false);
    Ok(BoundReport {
        sqrt_ratio,
        refined_ratio: refined,
        constant: params.exponent().map(constant_for),
        violation,
    })
}

fn constant_for(p: f64) -> f64 {
    math::powf(2.0, 2.0 * p / (p + 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::profile::{ProfileShape, RadialProfile};
    use crate::state::init_state;

    #[test]
    fn zero_state_has_zero_ratios() {
        let grid = GridSpec::new(0.125, 8.0, 1.0).unwrap();
        let state = FieldState::zero(&grid);
        let params = ModelParams::defocusing(3.0).unwrap();
        let report = pointwise_bound_report(&state, 0.0, &params).unwrap();
        assert_eq!(report.sqrt_ratio, 0.0);
        assert_eq!(report.refined_ratio, Some(0.0));
        assert!(!report.violation);
    }

    #[test]
    fn nonzero_state_with_zero_energy_is_inconsistent() {
        let grid = GridSpec::new(0.125, 8.0, 1.0).unwrap();
        let mut state = FieldState::zero(&grid);
        state.w[10] = 1.0;
        let params = ModelParams::defocusing(3.0).unwrap();
        assert!(matches!(
            pointwise_bound_report(&state, 0.0, &params),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn synthetic_sqrt_state_is_flagged() {
        // w(r) = √(2·E·r) exceeds the envelope by exactly √2.
        let grid = GridSpec::new(0.125, 8.0, 1.0).unwrap();
        let mut state = FieldState::zero(&grid);
        let energy = 3.0;
        for i in 0..state.len() {
            state.w[i] = math::sqrt(2.0 * energy * state.radius(i));
        }
        let params = ModelParams::defocusing(3.0).unwrap();
        let report = pointwise_bound_report(&state, energy, &params).unwrap();
        assert!(math::abs(report.sqrt_ratio - math::sqrt(2.0)) < 1e-12);
        assert!(report.violation);
    }

    #[test]
    fn initial_gaussian_state_is_within_both_envelopes() {
        let grid = GridSpec::new(1.0 / 256.0, 24.0, 4.0).unwrap();
        let profile = RadialProfile::static_data(ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap());
        let state = init_state(&profile, &grid).unwrap();
        let params = ModelParams::defocusing(3.0).unwrap();
        let energy = profile.energy_quadrature(&params, 1e-10);
        let report = pointwise_bound_report(&state, energy, &params).unwrap();
        assert!(!report.violation, "{report:?}");
        assert!(report.sqrt_ratio <= 1.0);
        assert!(report.refined_ratio.unwrap() <= 1.0);
    }
}
