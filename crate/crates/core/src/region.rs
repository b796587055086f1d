//! Space-time regions on the lattice and the energy-flux identities over
//! their boundaries.
//!
//! A region is a simple polygon in the (r, t) quarter-plane whose sides are
//! parallel to the axes or to the characteristic directions t ± r = const and
//! whose vertices sit on lattice nodes. For each such region, Green's theorem
//! turns the inward/outward energy balance into a sum of boundary line
//! integrals plus a bulk term ∓(2π(p−1)/(p+1))·∬ |w|^{p+1}/r^p dr dt; sides
//! lying on the t-axis contribute through the origin throughput measure
//! (density |u(0,t)|²). The residual of the assembled identity vanishes to
//! scheme order.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::FieldState;
use crate::trajectory::{Trajectory, TwoSidedTrajectory};

/// Which energy family an identity is assembled for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxFamily {
    /// Inward energy: density |w_r + w_t|², bulk term subtracted.
    Inward,
    /// Outward energy: density |w_r − w_t|², bulk term added.
    Outward,
}

/// Orientation class of a polygon side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideOrient {
    /// Constant t, varying r.
    Horizontal,
    /// Constant r > 0, varying t.
    Vertical,
    /// On the t-axis (r = 0), traversed downward.
    Axis,
    /// t + r = const (incoming characteristic).
    IncomingChar,
    /// t − r = const (outgoing characteristic).
    OutgoingChar,
}

/// One oriented side of a lattice polygon, in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Side {
    /// Orientation class.
    pub orient: SideOrient,
    /// Start vertex (r index, t index).
    pub from: (i64, i64),
    /// End vertex.
    pub to: (i64, i64),
}

impl Side {
    /// Inclusive time-row range of the side.
    pub fn rows(&self) -> (i64, i64) {
        let lo = self.from.1.min(self.to.1);
        let hi = self.from.1.max(self.to.1);
        (lo, hi)
    }

    /// Radius index where this (non-horizontal) side crosses time row `n`.
    pub fn radius_at_row(&self, n: i64) -> i64 {
        match self.orient {
            SideOrient::Vertical | SideOrient::Axis => self.from.0,
            _ => {
                let slope = (self.to.0 - self.from.0).signum()
                    * (self.to.1 - self.from.1).signum();
                self.from.0 + (n - self.from.1) * slope
            }
        }
    }
}

/// Simple lattice polygon with counterclockwise boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonRegion {
    vertices: Vec<(i64, i64)>,
    sides: Vec<Side>,
    row_range: (i64, i64),
}

impl PolygonRegion {
    /// Validate and build a region from lattice vertices (r index, t index).
    ///
    /// Requirements: at least three vertices; every side horizontal,
    /// vertical, or characteristic; counterclockwise orientation; vertices in
    /// the quarter-plane r ≥ 0, and sides on the t-axis traversed downward.
    pub fn new(vertices: Vec<(i64, i64)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Config("a region needs at least 3 vertices".into()));
        }
        if vertices.iter().any(|v| v.0 < 0) {
            return Err(Error::Config("region vertices must satisfy r >= 0".into()));
        }
        let mut sides = Vec::with_capacity(vertices.len());
        let mut area2 = 0i64;
        for k in 0..vertices.len() {
            let from = vertices[k];
            let to = vertices[(k + 1) % vertices.len()];
            let di = to.0 - from.0;
            let dn = to.1 - from.1;
            area2 += from.0 * to.1 - to.0 * from.1;
            let orient = match (di, dn) {
                (0, 0) => {
                    return Err(Error::Config(format!(
                        "degenerate region side at vertex {from:?}"
                    )))
                }
                (_, 0) => SideOrient::Horizontal,
                (0, _) if from.0 == 0 => {
                    if dn > 0 {
                        return Err(Error::Config(
                            "a counterclockwise region traverses the t-axis downward".into(),
                        ));
                    }
                    SideOrient::Axis
                }
                (0, _) => SideOrient::Vertical,
                _ if di == -dn => SideOrient::IncomingChar,
                _ if di == dn => SideOrient::OutgoingChar,
                _ => {
                    return Err(Error::Config(format!(
                        "region side {from:?} -> {to:?} is neither axis-parallel nor characteristic"
                    )))
                }
            };
            sides.push(Side { orient, from, to });
        }
        if area2 <= 0 {
            return Err(Error::Config(
                "region boundary must be oriented counterclockwise".into(),
            ));
        }
        let lo = vertices.iter().map(|v| v.1).min().unwrap();
        let hi = vertices.iter().map(|v| v.1).max().unwrap();
        Ok(Self {
            vertices,
            sides,
            row_range: (lo, hi),
        })
    }

    /// Axis-aligned rectangle [r1, r2] × [t1, t2] in lattice units.
    pub fn rectangle(r1: i64, r2: i64, t1: i64, t2: i64) -> Result<Self> {
        if r1 >= r2 || t1 >= t2 {
            return Err(Error::Config(format!(
                "rectangle needs r1 < r2 and t1 < t2 (got r: {r1}..{r2}, t: {t1}..{t2})"
            )));
        }
        Self::new(alloc::vec![(r1, t1), (r2, t1), (r2, t2), (r1, t2)])
    }

    /// Backward-light-cone triangle {t > t0, r > 0, r + t < t0 + r0} in
    /// lattice units.
    pub fn light_triangle(t0: i64, r0: i64) -> Result<Self> {
        if r0 <= 1 {
            return Err(Error::Config("light triangle needs r0 > 1".into()));
        }
        Self::new(alloc::vec![(0, t0), (r0, t0), (0, t0 + r0)])
    }

    /// Characteristic parallelogram {t0 < t < s, s < r + t < s2} in lattice
    /// units, the region that compares incoming flux across two cones.
    pub fn incoming_parallelogram(t0: i64, s: i64, s2: i64) -> Result<Self> {
        if !(t0 < s && s < s2) {
            return Err(Error::Config(format!(
                "incoming parallelogram needs t0 < s < s2 (got {t0}, {s}, {s2})"
            )));
        }
        Self::new(alloc::vec![
            (s - t0, t0),
            (s2 - t0, t0),
            (s2 - s, s),
            (0, s),
        ])
    }

    /// Trapezoid {r > 0, t1 < t < t2, r + t < s} in lattice units.
    pub fn cone_trapezoid(t1: i64, t2: i64, s: i64) -> Result<Self> {
        if !(t1 < t2 && t2 < s) {
            return Err(Error::Config(format!(
                "cone trapezoid needs t1 < t2 < s (got {t1}, {t2}, {s})"
            )));
        }
        Self::new(alloc::vec![(0, t1), (s - t1, t1), (s - t2, t2), (0, t2)])
    }

    /// Vertices in lattice units.
    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    /// Oriented sides.
    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    /// Inclusive time-row range covered by the region.
    pub fn row_range(&self) -> (i64, i64) {
        self.row_range
    }

    /// Largest radius index touched by the region.
    pub fn max_radius(&self) -> i64 {
        self.vertices.iter().map(|v| v.0).max().unwrap_or(0)
    }

    /// Cross-section {r : (r, t_n) ∈ region} as closed lattice intervals.
    ///
    /// Even-odd scanline over the non-horizontal sides; at the top row the
    /// half-open convention flips so the closing horizontal side is kept.
    pub fn row_intervals(&self, n: i64) -> Vec<(i64, i64)> {
        let (lo, hi) = self.row_range;
        if n < lo || n > hi {
            return Vec::new();
        }
        let mut crossings: Vec<i64> = Vec::new();
        let top = n == hi;
        for side in &self.sides {
            if matches!(side.orient, SideOrient::Horizontal) {
                continue;
            }
            let (slo, shi) = side.rows();
            let active = if top {
                n > slo && n <= shi
            } else {
                n >= slo && n < shi
            };
            if active {
                crossings.push(side.radius_at_row(n));
            }
        }
        crossings.sort_unstable();
        crossings
            .chunks_exact(2)
            .map(|pair| (pair[0], pair[1]))
            .collect()
    }
}

/// Accumulated boundary and bulk integrals of one region, for both families.
///
/// Side values follow the line-integral table (without the overall π); the
/// bulk term is the raw ∬ |w|^{p+1}/r^p dr dt.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionLedger {
    /// The region this ledger belongs to.
    pub region: PolygonRegion,
    /// Per-side inward-family line integrals, in side order.
    pub inward_sides: Vec<f64>,
    /// Per-side outward-family line integrals, in side order.
    pub outward_sides: Vec<f64>,
    /// ∬ over the region of |w|^{p+1}/r^p (no coefficient).
    pub bulk: f64,
}

/// Assembled flux identity for one region and family.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxIdentityReport {
    /// Family the identity was assembled for.
    pub family: FluxFamily,
    /// π-scaled boundary term of each side, in side order.
    pub side_terms: Vec<f64>,
    /// Signed bulk term ∓(2π(p−1)/(p+1))·∬ |w|^{p+1}/r^p.
    pub bulk_term: f64,
    /// |Σ sides + bulk|; vanishes to scheme order.
    pub residual: f64,
}

/// Assemble the Green's-theorem identity of a registered region.
///
/// The region must have been registered as a probe before the run.
pub fn flux_identity_residual(
    trajectory: &Trajectory,
    region: &PolygonRegion,
    family: FluxFamily,
) -> Result<FluxIdentityReport> {
    let ledger = trajectory
        .region_ledger(region)
        .ok_or_else(|| Error::MissingProbe("region was not registered before the run".into()))?;
    let pi = core::f64::consts::PI;
    let sides = match family {
        FluxFamily::Inward => &ledger.inward_sides,
        FluxFamily::Outward => &ledger.outward_sides,
    };
    let side_terms: Vec<f64> = sides.iter().map(|v| pi * v).collect();
    let coeff = match trajectory.params.exponent() {
        Some(p) => 2.0 * pi * (p - 1.0) / (p + 1.0),
        None => 0.0,
    };
    let bulk_term = match family {
        FluxFamily::Inward => -coeff * ledger.bulk,
        FluxFamily::Outward => coeff * ledger.bulk,
    };
    let residual = crate::math::abs(side_terms.iter().sum::<f64>() + bulk_term);
    Ok(FluxIdentityReport {
        family,
        side_terms,
        bulk_term,
        residual,
    })
}

/// Itemized triangle law over {t > t0, r > 0, r + t < t0 + r0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleLawReport {
    /// Inward energy E₋(t0; 0, r0) of the base.
    pub inward_energy: f64,
    /// Origin throughput π ∫ dμ over [t0, t0 + r0].
    pub origin_term: f64,
    /// Incoming flux across the hypotenuse (the truncated cone flux).
    pub cone_flux: f64,
    /// Bulk conversion term (2π(p−1)/(p+1))·∬ |w|^{p+1}/r^p.
    pub bulk_term: f64,
    /// |base − origin − flux − bulk|.
    pub residual: f64,
}

/// Evaluate the triangle law at lattice-aligned `t0`, `r0`.
///
/// Needs the triangle registered as a region probe and a snapshot at `t0`.
pub fn triangle_law_report(trajectory: &Trajectory, t0: f64, r0: f64) -> Result<TriangleLawReport> {
    let grid = &trajectory.grid;
    let n0 = grid.time_index(t0)? as i64;
    let i0 = grid.radius_index(r0)? as i64;
    let region = PolygonRegion::light_triangle(n0, i0)?;
    let ledger = trajectory.region_ledger(&region).ok_or_else(|| {
        Error::MissingProbe(format!(
            "light triangle (t0 = {t0}, r0 = {r0}) was not registered before the run"
        ))
    })?;
    let state = trajectory.snapshot_at(t0)?;
    let partition = crate::energy::partition_energies(state, 0.0, r0, &trajectory.params)?;
    let origin_term =
        core::f64::consts::PI * crate::energy::mu_accumulate(trajectory, t0, t0 + r0)?;
    // Side order of the light triangle: base (horizontal), hypotenuse
    // (incoming characteristic), axis. The inward-family table value of the
    // hypotenuse, times π, is the truncated cone flux; on a counterclockwise
    // boundary the hypotenuse runs up-left, so the stored value is negative.
    let cone_flux = core::f64::consts::PI * crate::math::abs(ledger.inward_sides[1]);
    let coeff = match trajectory.params.exponent() {
        Some(p) => 2.0 * core::f64::consts::PI * (p - 1.0) / (p + 1.0),
        None => 0.0,
    };
    let bulk_term = coeff * ledger.bulk;
    let inward_energy = partition.inward;
    let residual = crate::math::abs(inward_energy - origin_term - cone_flux - bulk_term);
    Ok(TriangleLawReport {
        inward_energy,
        origin_term,
        cone_flux,
        bulk_term,
        residual,
    })
}

/// Two-sided global bookkeeping: over [−T, T] the origin throughput plus the
/// bulk conversion reproduce the conserved energy up to the inward/outward
/// tails at the horizon ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentityReport {
    /// π ∫_{−T}^{T} dμ.
    pub origin_term: f64,
    /// (2π(p−1)/(p+1)) ∬_{[−T,T]×(0,∞)} |w|^{p+1}/r^p.
    pub bulk_term: f64,
    /// Conserved energy E (measured at t = 0).
    pub energy: f64,
    /// |origin + bulk − E|.
    pub residual: f64,
    /// Tail bound E₋(T) + E₊(−T) that controls the truncation.
    pub tail_bound: f64,
}

/// Evaluate the global bookkeeping identity over the two-sided horizon.
pub fn energy_identity_check(run: &TwoSidedTrajectory) -> Result<EnergyIdentityReport> {
    let fwd = &run.forward;
    let rev = &run.backward;
    let t_end = fwd.grid.t_end();
    if rev.grid.t_end() != t_end {
        return Err(Error::Config(
            "two-sided run must use the same horizon in both directions".into(),
        ));
    }
    let pi = core::f64::consts::PI;
    let origin_term = pi
        * (crate::energy::mu_accumulate(fwd, 0.0, t_end)?
            + crate::energy::mu_accumulate(rev, 0.0, t_end)?);
    let coeff = match fwd.params.exponent() {
        Some(p) => 2.0 * pi * (p - 1.0) / (p + 1.0),
        None => 0.0,
    };
    let bulk_term = coeff * (fwd.spacetime_weight_rp() + rev.spacetime_weight_rp());
    let energy = fwd.energy_series.total[0];
    let residual = crate::math::abs(origin_term + bulk_term - energy);
    // E₋ at the forward end; E₊ at −T equals E₋ of the reversed flow at T.
    let n = fwd.energy_series.inward.len() - 1;
    let tail_bound = fwd.energy_series.inward[n] + rev.energy_series.inward[n];
    Ok(EnergyIdentityReport {
        origin_term,
        bulk_term,
        energy,
        residual,
        tail_bound,
    })
}

/// Inward-family horizontal line integral over the whole grid,
/// ∫(φ² + (2/(p+1))|w|^{p+1}/r^{p−1}) dr = E₋/π. Shared by tests and
/// cross-checks that want a state-based route independent of run ledgers.
pub fn horizontal_inward_integral(state: &FieldState, params: &crate::params::ModelParams) -> f64 {
    let coeff = params.potential_coefficient();
    let p = params.exponent().unwrap_or(3.0);
    let n = state.len();
    let mut values = alloc::vec![0.0; n];
    for i in 1..n {
        let r = state.radius(i);
        let pot = if coeff == 0.0 {
            0.0
        } else {
            coeff * crate::math::abs_pow(state.w[i], p + 1.0) / crate::math::abs_pow(r, p - 1.0)
        };
        values[i] = state.phi[i] * state.phi[i] + pot;
    }
    values[0] = state.phi[0] * state.phi[0];
    crate::math::trapezoid(&values, state.dr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_scanline_is_exact() {
        let region = PolygonRegion::rectangle(4, 10, 2, 6).unwrap();
        assert_eq!(region.row_intervals(1), alloc::vec![]);
        assert_eq!(region.row_intervals(2), alloc::vec![(4, 10)]);
        assert_eq!(region.row_intervals(4), alloc::vec![(4, 10)]);
        assert_eq!(region.row_intervals(6), alloc::vec![(4, 10)]);
        assert_eq!(region.row_intervals(7), alloc::vec![]);
    }

    #[test]
    fn triangle_scanline_shrinks_toward_apex() {
        let region = PolygonRegion::light_triangle(3, 8).unwrap();
        assert_eq!(region.row_intervals(3), alloc::vec![(0, 8)]);
        assert_eq!(region.row_intervals(7), alloc::vec![(0, 4)]);
        assert_eq!(region.row_intervals(11), alloc::vec![(0, 0)]);
    }

    #[test]
    fn parallelogram_sides_classified() {
        let region = PolygonRegion::incoming_parallelogram(1, 5, 9).unwrap();
        let orients: Vec<SideOrient> = region.sides().iter().map(|s| s.orient).collect();
        assert_eq!(
            orients,
            alloc::vec![
                SideOrient::Horizontal,
                SideOrient::IncomingChar,
                SideOrient::Horizontal,
                SideOrient::IncomingChar,
            ]
        );
        assert_eq!(region.row_intervals(3), alloc::vec![(2, 6)]);
    }

    #[test]
    fn bad_regions_rejected() {
        // Clockwise.
        assert!(PolygonRegion::new(alloc::vec![(0, 0), (0, 4), (4, 0)]).is_err());
        // Slope 2 side.
        assert!(PolygonRegion::new(alloc::vec![(0, 0), (4, 0), (2, 4)]).is_err());
        // Negative radius.
        assert!(PolygonRegion::new(alloc::vec![(-1, 0), (4, 0), (0, 4)]).is_err());
        // Axis traversed upward: impossible on a counterclockwise boundary.
        assert!(PolygonRegion::new(alloc::vec![(0, 0), (0, 3), (3, 3), (3, 0)]).is_err());
    }
}
