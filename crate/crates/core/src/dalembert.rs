//! Closed-form free-wave oracle on the half line.
//!
//! The reduced linear problem wₜₜ = wᵣᵣ with w(0, t) = 0 is solved by odd
//! extension: with W₀ the odd extension of r·u₀ and W₁ the odd extension of
//! r·u₁,
//!
//!   w(r, t) = ½[W₀(r+t) + W₀(r−t)] + ½ ∫_{r−t}^{r+t} W₁(ρ) dρ.
//!
//! The integral term is the difference of the even antiderivative
//! X(|y|) = ∫₀^{|y|} ρ·u₁(ρ) dρ, which profiles expose in closed form (or by
//! adaptive quadrature to 1e−12 where no closed form exists), so the oracle
//! never touches the finite-difference path it is used to check.

use crate::profile::RadialProfile;

/// Point values of a free wave: (w, w_r, w_t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreePoint {
    /// w(r, t).
    pub w: f64,
    /// ∂w/∂r.
    pub w_r: f64,
    /// ∂w/∂t.
    pub w_t: f64,
}

/// Odd extension of y ↦ y·u₀(|y|).
fn w0(profile: &RadialProfile, y: f64) -> f64 {
    y * profile.position.value(crate::math::abs(y))
}

/// Derivative of the odd extension; an even function.
fn w0_slope(profile: &RadialProfile, y: f64) -> f64 {
    let a = crate::math::abs(y);
    profile.position.value(a) + a * profile.position.slope(a)
}

/// Odd extension of y ↦ y·u₁(|y|).
fn w1(profile: &RadialProfile, y: f64) -> f64 {
    y * profile.velocity.value(crate::math::abs(y))
}

/// Even antiderivative of the odd extension of ρ·u₁.
fn moment(profile: &RadialProfile, y: f64) -> f64 {
    profile.velocity.radial_moment(crate::math::abs(y))
}

/// Evaluate the free wave generated by `profile` at (r, t).
pub fn dalembert_linear(profile: &RadialProfile, r: f64, t: f64) -> FreePoint {
    let plus = r + t;
    let minus = r - t;
    let w = 0.5 * (w0(profile, plus) + w0(profile, minus))
        + 0.5 * (moment(profile, plus) - moment(profile, minus));
    let w_r = 0.5 * (w0_slope(profile, plus) + w0_slope(profile, minus))
        + 0.5 * (w1(profile, plus) - w1(profile, minus));
    let w_t = 0.5 * (w0_slope(profile, plus) - w0_slope(profile, minus))
        + 0.5 * (w1(profile, plus) + w1(profile, minus));
    FreePoint { w, w_r, w_t }
}

/// Outgoing Riemann invariant (w_r − w_t)(r, t) of the free wave along the
/// characteristic τ = t − r. It is constant along the line:
/// ψ(τ) = W₀'(τ) + W₁(τ), the exact radiation profile of the linear flow.
pub fn linear_outgoing_invariant(profile: &RadialProfile, tau: f64) -> f64 {
    w0_slope(profile, tau) + w1(profile, tau)
}
