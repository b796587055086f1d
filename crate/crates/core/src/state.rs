//! One time slice of the reduced field w = r·u and its construction from
//! initial data.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::profile::RadialProfile;

/// One time slice of the reduced field on the uniform lattice rᵢ = i·dr.
///
/// Besides w itself the state carries the two Riemann invariants
/// φ = w_r + w_t (transported toward the origin along t + r = const) and
/// ψ = w_r − w_t (transported outward along t − r = const), and the
/// half-wave split w = `inward` + `outward` whose parts ride the same two
/// characteristic families. The split is what lets the integrator move w
/// itself by exact lattice transport; `inward + outward = w` holds at every
/// grid point, and at the origin the incoming half reflects with a sign flip
/// so that w(0, t) = 0 exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Time of the slice.
    pub t: f64,
    /// Radial step of the lattice the arrays live on.
    pub dr: f64,
    /// w(rᵢ, t).
    pub w: Vec<f64>,
    /// φᵢ = (w_r + w_t)(rᵢ, t).
    pub phi: Vec<f64>,
    /// ψᵢ = (w_r − w_t)(rᵢ, t).
    pub psi: Vec<f64>,
    /// Incoming half-wave amplitude (moves toward r = 0 as t grows).
    pub inward: Vec<f64>,
    /// Outgoing half-wave amplitude (moves away from r = 0 as t grows).
    pub outward: Vec<f64>,
}

impl FieldState {
    /// All-zero state on the given grid.
    pub fn zero(grid: &GridSpec) -> Self {
        let n = grid.n_r() + 1;
        Self {
            t: 0.0,
            dr: grid.dr(),
            w: alloc::vec![0.0; n],
            phi: alloc::vec![0.0; n],
            psi: alloc::vec![0.0; n],
            inward: alloc::vec![0.0; n],
            outward: alloc::vec![0.0; n],
        }
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// True when the state has no grid points (never produced by this crate).
    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Radius of grid point `i`.
    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.dr
    }

    /// w_r at grid point `i`, reconstructed from the invariants.
    pub fn w_r(&self, i: usize) -> f64 {
        0.5 * (self.phi[i] + self.psi[i])
    }

    /// w_t at grid point `i`, reconstructed from the invariants.
    pub fn w_t(&self, i: usize) -> f64 {
        0.5 * (self.phi[i] - self.psi[i])
    }

    /// u(rᵢ, t) = w/r away from the origin; at i = 0 the limit u(0, t),
    /// which equals the common value φ(0) = ψ(0).
    pub fn u(&self, i: usize) -> f64 {
        if i == 0 {
            self.phi[0]
        } else {
            self.w[i] / self.radius(i)
        }
    }

    /// True when every array entry is finite.
    pub fn is_finite(&self) -> bool {
        self.w.iter().all(|v| v.is_finite())
            && self.phi.iter().all(|v| v.is_finite())
            && self.psi.iter().all(|v| v.is_finite())
            && self.inward.iter().all(|v| v.is_finite())
            && self.outward.iter().all(|v| v.is_finite())
    }

    /// Largest absolute value of w over the grid.
    pub fn max_abs_w(&self) -> f64 {
        self.w.iter().fold(0.0, |m, v| m.max(crate::math::abs(*v)))
    }
}

/// Build the initial state from a data profile.
///
/// wᵢ = rᵢ·u₀(rᵢ) and w_t = rᵢ·u₁(rᵢ); w_r comes from the closed-form slope
/// when the displacement shape has one, otherwise from 4th-order central
/// differences of the w samples (one order above the scheme so finite
/// differencing does not pollute convergence studies). The half-wave split is
/// fixed by the cumulative velocity moment X(r) = ∫₀^r ρ·u₁ dρ:
/// outward = (w − X)/2, inward = (w + X)/2.
///
/// Errors when the data support plus the run horizon would reach the outer
/// boundary, which would break the reflection-free truncation.
pub fn init_state(profile: &RadialProfile, grid: &GridSpec) -> Result<FieldState> {
    let support = profile.support_radius();
    let guard = support + grid.t_end();
    if guard > grid.r_max() + 1e-9 * grid.r_max() {
        return Err(Error::Config(format!(
            "data support (r <= {support}) plus horizon t_end = {} reaches {guard}, beyond r_max = {}; enlarge the grid or shorten the run",
            grid.t_end(),
            grid.r_max()
        )));
    }

    let n = grid.n_r() + 1;
    let dr = grid.dr();
    let mut w = alloc::vec![0.0; n];
    let mut wt = alloc::vec![0.0; n];
    for i in 0..n {
        let r = grid.radius(i);
        w[i] = r * profile.position.value(r);
        wt[i] = r * profile.velocity.value(r);
    }
    w[0] = 0.0;
    wt[0] = 0.0;

    let mut wr = alloc::vec![0.0; n];
    if profile.position.has_closed_slope() {
        for i in 0..n {
            let r = grid.radius(i);
            wr[i] = profile.position.value(r) + r * profile.position.slope(r);
        }
    } else {
        // 4th-order central differences of w; one-sided at the edges.
        for i in 0..n {
            wr[i] = if i >= 2 && i + 2 < n {
                (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * dr)
            } else if i + 4 < n {
                (-25.0 * w[i] + 48.0 * w[i + 1] - 36.0 * w[i + 2] + 16.0 * w[i + 3]
                    - 3.0 * w[i + 4])
                    / (12.0 * dr)
            } else {
                (25.0 * w[i] - 48.0 * w[i - 1] + 36.0 * w[i - 2] - 16.0 * w[i - 3]
                    + 3.0 * w[i - 4])
                    / (12.0 * dr)
            };
        }
    }

    let mut phi = alloc::vec![0.0; n];
    let mut psi = alloc::vec![0.0; n];
    for i in 0..n {
        phi[i] = wr[i] + wt[i];
        psi[i] = wr[i] - wt[i];
    }
    // w_t(0) = 0 forces φ(0) = ψ(0); enforce it exactly.
    let origin = 0.5 * (phi[0] + psi[0]);
    phi[0] = origin;
    psi[0] = origin;

    let mut inward = alloc::vec![0.0; n];
    let mut outward = alloc::vec![0.0; n];
    for i in 0..n {
        let x = profile.velocity.radial_moment(grid.radius(i));
        inward[i] = 0.5 * (w[i] + x);
        outward[i] = 0.5 * (w[i] - x);
    }

    Ok(FieldState {
        t: 0.0,
        dr,
        w,
        phi,
        psi,
        inward,
        outward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;
    use crate::profile::ProfileShape;

    fn test_grid() -> GridSpec {
        GridSpec::new(1.0 / 128.0, 24.0, 4.0).unwrap()
    }

    #[test]
    fn zero_profile_gives_zero_state() {
        let state = init_state(
            &RadialProfile::static_data(ProfileShape::Zero),
            &test_grid(),
        )
        .unwrap();
        assert!(state.w.iter().all(|&v| v == 0.0));
        assert!(state.phi.iter().all(|&v| v == 0.0));
        assert!(state.psi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn velocity_free_data_has_equal_invariants() {
        let profile = RadialProfile::static_data(ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap());
        let state = init_state(&profile, &test_grid()).unwrap();
        assert_eq!(state.w[0], 0.0);
        assert_eq!(state.phi[0], state.psi[0]);
        for i in 0..state.len() {
            assert_eq!(state.phi[i], state.psi[i]);
            // u₁ = 0 splits w evenly between the half-waves.
            assert_eq!(state.inward[i], state.outward[i]);
        }
    }

    #[test]
    fn half_wave_split_reassembles_w() {
        let profile = RadialProfile::new(
            ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap(),
            ProfileShape::gaussian(0.5, 4.0, 0.8).unwrap(),
        );
        let state = init_state(&profile, &test_grid()).unwrap();
        for i in 0..state.len() {
            let sum = state.inward[i] + state.outward[i];
            assert!(math::abs(sum - state.w[i]) < 1e-14 * (1.0 + math::abs(state.w[i])));
        }
    }

    #[test]
    fn central_difference_of_w_matches_invariant_mean() {
        let profile = RadialProfile::static_data(ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap());
        let grid = test_grid();
        let state = init_state(&profile, &grid).unwrap();
        let dr = grid.dr();
        let mut worst: f64 = 0.0;
        for i in 1..state.len() - 1 {
            let central = (state.w[i + 1] - state.w[i - 1]) / (2.0 * dr);
            worst = worst.max(math::abs(central - 0.5 * (state.phi[i] + state.psi[i])));
        }
        // Central difference is O(dr²); the invariants hold the exact slope.
        assert!(worst < 2.0 * dr * dr, "worst deviation {worst}");
    }

    #[test]
    fn analytic_slope_matches_finite_difference_profile() {
        // Same shape once closed-form and once sampled: φ, ψ agree to O(dr⁴).
        let grid = GridSpec::new(1.0 / 64.0, 24.0, 4.0).unwrap();
        let shape = ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap();
        let sampled = ProfileShape::samples(
            (0..=grid.n_r()).map(|i| shape.value(grid.radius(i))).collect(),
            grid.dr(),
        )
        .unwrap();
        let exact = init_state(&RadialProfile::static_data(shape), &grid).unwrap();
        let approx = init_state(&RadialProfile::static_data(sampled), &grid).unwrap();
        let worst = exact
            .phi
            .iter()
            .zip(&approx.phi)
            .map(|(a, b)| math::abs(a - b))
            .fold(0.0, f64::max);
        let dr4 = grid.dr().powi(4);
        assert!(worst < 50.0 * dr4, "worst deviation {worst} vs dr⁴ = {dr4}");
    }

    #[test]
    fn support_guard_rejects_tight_grids() {
        let profile = RadialProfile::static_data(ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap());
        let tight = GridSpec::new(1.0 / 16.0, 20.0, 4.0).unwrap();
        assert!(matches!(init_state(&profile, &tight), Err(Error::Config(_))));
    }

    #[test]
    fn power_tail_data_accepted_after_truncation() {
        // Decay class q = 2(p+4)/(p+1)² + ε at p = 3, ε = 0.01.
        let shape = ProfileShape::power_tail(1.0, 1.0, 0.885, 12.0).unwrap();
        let grid = GridSpec::new(1.0 / 64.0, 20.0, 4.0).unwrap();
        let state = init_state(&RadialProfile::static_data(shape), &grid).unwrap();
        assert!(state.is_finite());
        assert!(state.max_abs_w() > 0.0);
    }
}
