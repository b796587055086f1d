//! Uniform space-time lattice with the exact-transport coupling dt = dr.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;

/// Relative slack accepted when snapping a coordinate to the lattice.
const ALIGN_TOL: f64 = 1e-9;

/// Uniform radial grid rᵢ = i·dr, i = 0..=n_r, advanced with dt = dr.
///
/// The time step is locked to the radial step so that linear transport of the
/// Riemann invariants is exact on the lattice and every characteristic line
/// through a grid node stays on grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dr: f64,
    n_r: usize,
    n_steps: usize,
}

impl GridSpec {
    /// Build a grid covering at least `[0, r_max] × [0, t_end]`.
    ///
    /// `r_max` and `t_end` are rounded up to whole numbers of cells (with a
    /// small tolerance so exact multiples do not gain a spurious cell).
    pub fn new(dr: f64, r_max: f64, t_end: f64) -> Result<Self> {
        if !(dr > 0.0) || !dr.is_finite() {
            return Err(Error::Config(format!("radial step dr = {dr} must be positive")));
        }
        if !(r_max > 0.0) || !(t_end >= 0.0) {
            return Err(Error::Config(format!(
                "grid extents must satisfy r_max > 0 and t_end >= 0 (got {r_max}, {t_end})"
            )));
        }
        let n_r = math::ceil(r_max / dr - ALIGN_TOL) as usize;
        let n_steps = math::ceil(t_end / dr - ALIGN_TOL) as usize;
        if n_r < 4 {
            return Err(Error::Config(format!(
                "grid needs at least 4 radial cells, got {n_r}"
            )));
        }
        Ok(Self { dr, n_r, n_steps })
    }

    /// Radial (and time) step.
    pub fn dr(&self) -> f64 {
        self.dr
    }

    /// Time step; equal to `dr` by construction (λ = dt/dr = 1).
    pub fn dt(&self) -> f64 {
        self.dr
    }

    /// Number of radial cells; grid points are 0..=n_r.
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Number of time steps to reach the final time.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Outer radius n_r·dr.
    pub fn r_max(&self) -> f64 {
        self.n_r as f64 * self.dr
    }

    /// Final time n_steps·dt.
    pub fn t_end(&self) -> f64 {
        self.n_steps as f64 * self.dr
    }

    /// Radius of grid point `i`.
    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.dr
    }

    /// Time of step `n`.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dr
    }

    /// Lattice index of a radius, requiring it to sit on the lattice.
    pub fn radius_index(&self, r: f64) -> Result<usize> {
        let idx = math::round(r / self.dr);
        if math::abs(r - idx * self.dr) > ALIGN_TOL * self.dr.max(math::abs(r)) {
            return Err(Error::Misaligned(format!(
                "radius {r} is not on the lattice with dr = {}",
                self.dr
            )));
        }
        if idx < 0.0 || idx as usize > self.n_r {
            return Err(Error::Config(format!(
                "radius {r} outside the grid [0, {}]",
                self.r_max()
            )));
        }
        Ok(idx as usize)
    }

    /// Lattice index of a time, requiring it to sit on the step lattice.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        let idx = math::round(t / self.dr);
        if math::abs(t - idx * self.dr) > ALIGN_TOL * self.dr.max(math::abs(t)) {
            return Err(Error::Misaligned(format!(
                "time {t} is not on the lattice with dt = {}",
                self.dr
            )));
        }
        if idx < 0.0 || idx as usize > self.n_steps {
            return Err(Error::Config(format!(
                "time {t} outside the run horizon [0, {}]",
                self.t_end()
            )));
        }
        Ok(idx as usize)
    }

    /// Signed lattice index of a characteristic label (τ = t−r or s = t+r),
    /// requiring lattice alignment. Labels may be negative (τ of lines that
    /// start at positive radius) or exceed the horizon (s of lines that leave
    /// through the outer edge).
    pub fn label_index(&self, label: f64) -> Result<i64> {
        let idx = math::round(label / self.dr);
        if math::abs(label - idx * self.dr) > ALIGN_TOL * self.dr.max(math::abs(label)) {
            return Err(Error::Misaligned(format!(
                "characteristic label {label} is not on the lattice with dr = {}",
                self.dr
            )));
        }
        Ok(idx as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_multiples_round_trip() {
        let g = GridSpec::new(0.25, 16.0, 8.0).unwrap();
        assert_eq!(g.n_r(), 64);
        assert_eq!(g.n_steps(), 32);
        assert_eq!(g.r_max(), 16.0);
        assert_eq!(g.t_end(), 8.0);
        assert_eq!(g.radius_index(4.25).unwrap(), 17);
        assert_eq!(g.time_index(7.75).unwrap(), 31);
        assert_eq!(g.label_index(-3.5).unwrap(), -14);
    }

    #[test]
    fn misaligned_coordinates_rejected() {
        let g = GridSpec::new(0.25, 16.0, 8.0).unwrap();
        assert!(matches!(g.radius_index(4.30), Err(Error::Misaligned(_))));
        assert!(matches!(g.time_index(0.1), Err(Error::Misaligned(_))));
        assert!(matches!(g.radius_index(17.0), Err(Error::Config(_))));
    }

    #[test]
    fn non_multiple_extents_round_up() {
        let g = GridSpec::new(0.25, 15.9, 7.9).unwrap();
        assert_eq!(g.n_r(), 64);
        assert_eq!(g.n_steps(), 32);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(GridSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(GridSpec::new(-0.5, 1.0, 1.0).is_err());
        assert!(GridSpec::new(1.0, 2.0, 1.0).is_err());
    }
}
