//! Initial-data profiles: closed-form radial shapes and sampled data.
//!
//! A [`RadialProfile`] carries the initial displacement u₀ and velocity u₁ of
//! the 3D field u. Closed-form kinds expose exact values, slopes, and radial
//! first moments ∫₀^r ρ·f(ρ) dρ; the moment of the velocity profile is what
//! fixes the half-wave split of the reduced field at start-up and feeds the
//! d'Alembert oracle.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::params::ModelParams;

/// Fraction of a Gaussian amplitude considered numerically zero: beyond
/// `center + GAUSSIAN_SUPPORT_SIGMAS·sigma` the tail is below e⁻⁷² ≈ 5e−32.
const GAUSSIAN_SUPPORT_SIGMAS: f64 = 12.0;

/// Absolute tolerance for adaptive quadratures of profile integrals.
const MOMENT_TOL: f64 = 1e-12;

/// One radial shape: used for both the displacement u₀ and the velocity u₁.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// Identically zero.
    Zero,
    /// A·exp(−(r−center)²/(2σ²)). Smooth, numerically compactly supported.
    GaussianBump {
        /// Peak amplitude A.
        amplitude: f64,
        /// Bump center r_c.
        center: f64,
        /// Width σ.
        sigma: f64,
    },
    /// A·(1 − ((r−center)/width)²)³ inside |r−center| < width, zero outside.
    /// C² across the support edges.
    PolynomialBump {
        /// Peak amplitude A.
        amplitude: f64,
        /// Bump center r_c.
        center: f64,
        /// Half-width of the support.
        width: f64,
    },
    /// A·(1 + (r/core_radius)²)^{−q/2}, multiplied by a C² cutoff that ramps
    /// from 1 to 0 over [cutoff_start, cutoff_start + 2·core_radius]. Decays
    /// like r^{−q} before truncation; the truncation keeps the support
    /// compact so the outer boundary stays reflection-free.
    PowerTail {
        /// Amplitude A.
        amplitude: f64,
        /// Core regularization scale (also sets the cutoff ramp length).
        core_radius: f64,
        /// Tail decay exponent q.
        exponent: f64,
        /// Radius where the cutoff ramp begins.
        cutoff_start: f64,
    },
    /// Uniform samples f(i·dx), cubically interpolated; zero beyond the last
    /// sample. `moment` is the precomputed cumulative ∫₀^{i·dx} ρ f(ρ) dρ and
    /// must match `values`; build through [`ProfileShape::samples`].
    Samples {
        /// Sample values starting at r = 0.
        values: Vec<f64>,
        /// Sample spacing.
        dx: f64,
        /// Cumulative radial first moment at the sample points.
        moment: Vec<f64>,
    },
}

/// Quintic smoothstep that is 1 at x ≤ 0 and 0 at x ≥ 1 with two vanishing
/// derivatives at both ends.
fn cutoff(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
    }
}

fn cutoff_slope(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -30.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

impl ProfileShape {
    /// Gaussian bump with validated parameters.
    pub fn gaussian(amplitude: f64, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !amplitude.is_finite() || !(center >= 0.0) {
            return Err(Error::Config(format!(
                "gaussian bump needs sigma > 0, center >= 0, finite amplitude (got A={amplitude}, r_c={center}, sigma={sigma})"
            )));
        }
        Ok(Self::GaussianBump {
            amplitude,
            center,
            sigma,
        })
    }

    /// Compactly supported polynomial bump with validated parameters.
    pub fn polynomial(amplitude: f64, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !amplitude.is_finite() || !(center >= 0.0) {
            return Err(Error::Config(format!(
                "polynomial bump needs width > 0, center >= 0, finite amplitude (got A={amplitude}, r_c={center}, width={width})"
            )));
        }
        Ok(Self::PolynomialBump {
            amplitude,
            center,
            width,
        })
    }

    /// Truncated power tail with validated parameters.
    pub fn power_tail(
        amplitude: f64,
        core_radius: f64,
        exponent: f64,
        cutoff_start: f64,
    ) -> Result<Self> {
        if !(core_radius > 0.0) || !(exponent > 0.5) || !(cutoff_start > 0.0) {
            return Err(Error::Config(format!(
                "power tail needs core_radius > 0, exponent > 1/2 (finite gradient energy), cutoff_start > 0 (got a={core_radius}, q={exponent}, r_trunc={cutoff_start})"
            )));
        }
        Ok(Self::PowerTail {
            amplitude,
            core_radius,
            exponent,
            cutoff_start,
        })
    }

    /// Sampled shape; precomputes the cumulative radial moment.
    pub fn samples(values: Vec<f64>, dx: f64) -> Result<Self> {
        if values.len() < 4 || !(dx > 0.0) {
            return Err(Error::Config(format!(
                "sampled profile needs at least 4 samples and dx > 0 (got {} samples, dx={dx})",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sampled profile contains non-finite values".into()));
        }
        let weighted: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(i, v)| i as f64 * dx * v)
            .collect();
        let moment = math::cumulative_integral(&weighted, dx);
        Ok(Self::Samples { values, dx, moment })
    }

    /// Shape value at radius `r ≥ 0`.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::GaussianBump {
                amplitude,
                center,
                sigma,
            } => {
                let z = (r - center) / sigma;
                amplitude * math::exp(-0.5 * z * z)
            }
            Self::PolynomialBump {
                amplitude,
                center,
                width,
            } => {
                let x = (r - center) / width;
                if math::abs(x) >= 1.0 {
                    0.0
                } else {
                    let s = 1.0 - x * x;
                    amplitude * s * s * s
                }
            }
            Self::PowerTail {
                amplitude,
                core_radius,
                exponent,
                cutoff_start,
            } => {
                let x = (r - cutoff_start) / (2.0 * core_radius);
                if x >= 1.0 {
                    return 0.0;
                }
                let z = r / core_radius;
                amplitude * math::powf(1.0 + z * z, -0.5 * exponent) * cutoff(x)
            }
            Self::Samples { values, dx, .. } => interpolate(values, *dx, r).0,
        }
    }

    /// Shape derivative d/dr at radius `r ≥ 0`. Exact for closed-form kinds,
    /// cubic-interpolant derivative for samples.
    pub fn slope(&self, r: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::GaussianBump {
                amplitude,
                center,
                sigma,
            } => {
                let z = (r - center) / sigma;
                -amplitude * z / sigma * math::exp(-0.5 * z * z)
            }
            Self::PolynomialBump {
                amplitude,
                center,
                width,
            } => {
                let x = (r - center) / width;
                if math::abs(x) >= 1.0 {
                    0.0
                } else {
                    let s = 1.0 - x * x;
                    -6.0 * amplitude * x * s * s / width
                }
            }
            Self::PowerTail {
                amplitude,
                core_radius,
                exponent,
                cutoff_start,
            } => {
                let x = (r - cutoff_start) / (2.0 * core_radius);
                if x >= 1.0 {
                    return 0.0;
                }
                let z = r / core_radius;
                let base = math::powf(1.0 + z * z, -0.5 * exponent);
                let dbase = -exponent * r / (core_radius * core_radius)
                    * math::powf(1.0 + z * z, -0.5 * exponent - 1.0);
                amplitude
                    * (dbase * cutoff(x) + base * cutoff_slope(x) / (2.0 * core_radius))
            }
            Self::Samples { values, dx, .. } => interpolate(values, *dx, r).1,
        }
    }

    /// Radial first moment ∫₀^r ρ·f(ρ) dρ. Closed form where one exists,
    /// adaptive quadrature for the truncated power tail, table lookup for
    /// samples.
    pub fn radial_moment(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Zero => 0.0,
            Self::GaussianBump {
                amplitude,
                center,
                sigma,
            } => {
                let s2 = sigma * sigma;
                let sqrt2 = math::sqrt(2.0);
                let head = s2
                    * (math::exp(-0.5 * center * center / s2)
                        - math::exp(-0.5 * (r - center) * (r - center) / s2));
                let tail = center
                    * sigma
                    * math::sqrt(core::f64::consts::PI / 2.0)
                    * (math::erf((r - center) / (sqrt2 * sigma))
                        + math::erf(center / (sqrt2 * sigma)));
                amplitude * (head + tail)
            }
            Self::PolynomialBump {
                amplitude,
                center,
                width,
            } => {
                // Substituting x = (ρ−c)/h: ∫ρf dρ = A·h·[c·P(x) + h·Q(x)]
                // with P = ∫(1−x²)³dx and Q = ∫x(1−x²)³dx.
                let poly_p = |x: f64| {
                    let x2 = x * x;
                    x * (1.0 + x2 * (-1.0 + x2 * (0.6 - x2 / 7.0)))
                };
                let poly_q = |x: f64| {
                    let s = 1.0 - x * x;
                    -s * s * s * s / 8.0
                };
                let lo = (-center / width).max(-1.0);
                let hi = ((r - center) / width).clamp(-1.0, 1.0);
                if hi <= lo {
                    return 0.0;
                }
                amplitude
                    * width
                    * (center * (poly_p(hi) - poly_p(lo)) + width * (poly_q(hi) - poly_q(lo)))
            }
            Self::PowerTail { .. } => {
                let f = |rho: f64| rho * self.value(rho);
                math::adaptive_simpson(&f, 0.0, r.min(self.support_radius()), MOMENT_TOL)
            }
            Self::Samples { dx, moment, .. } => {
                if r >= (moment.len() - 1) as f64 * dx {
                    moment[moment.len() - 1]
                } else {
                    interpolate(moment, *dx, r).0
                }
            }
        }
    }

    /// Radius beyond which the shape is (numerically) zero.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::GaussianBump { center, sigma, .. } => center + GAUSSIAN_SUPPORT_SIGMAS * sigma,
            Self::PolynomialBump { center, width, .. } => center + width,
            Self::PowerTail {
                core_radius,
                cutoff_start,
                ..
            } => cutoff_start + 2.0 * core_radius,
            Self::Samples { values, dx, .. } => {
                // Last sample above 1e−14 of the peak; quieter tails cannot
                // reach the outer boundary at any visible level.
                let peak = values.iter().fold(0.0, |m: f64, v| m.max(math::abs(*v)));
                let last = values
                    .iter()
                    .rposition(|v| math::abs(*v) > 1e-14 * peak)
                    .unwrap_or(0);
                last as f64 * dx
            }
        }
    }

    /// True for the identically-zero shape.
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// True when `slope` is exact (closed form) rather than interpolated.
    pub fn has_closed_slope(&self) -> bool {
        !matches!(self, Self::Samples { .. })
    }
}

/// Cubic Lagrange interpolation of uniform samples; returns (value, slope).
/// Zero (with zero slope) beyond the sampled range.
fn interpolate(values: &[f64], dx: f64, r: f64) -> (f64, f64) {
    let n = values.len();
    let x = r / dx;
    if x < 0.0 || x > (n - 1) as f64 {
        return (0.0, 0.0);
    }
    let j = (math::floor(x) as usize).min(n - 2);
    let start = j.saturating_sub(1).min(n - 4);
    let t = x - start as f64;
    // Lagrange basis on nodes 0,1,2,3 of the stencil.
    let f = &values[start..start + 4];
    let l = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    let dl = [
        -((t - 2.0) * (t - 3.0) + (t - 1.0) * (t - 3.0) + (t - 1.0) * (t - 2.0)) / 6.0,
        ((t - 2.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 2.0)) / 2.0,
        -((t - 1.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 1.0)) / 2.0,
        ((t - 1.0) * (t - 2.0) + t * (t - 2.0) + t * (t - 1.0)) / 6.0,
    ];
    let value = l.iter().zip(f).map(|(a, b)| a * b).sum::<f64>();
    let slope = dl.iter().zip(f).map(|(a, b)| a * b).sum::<f64>() / dx;
    (value, slope)
}

/// Initial data (u₀, u₁) for the 3D field.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// Initial displacement u₀.
    pub position: ProfileShape,
    /// Initial velocity u₁.
    pub velocity: ProfileShape,
}

impl RadialProfile {
    /// Bundle displacement and velocity shapes.
    pub fn new(position: ProfileShape, velocity: ProfileShape) -> Self {
        Self { position, velocity }
    }

    /// Displacement-only data (u₁ = 0).
    pub fn static_data(position: ProfileShape) -> Self {
        Self {
            position,
            velocity: ProfileShape::Zero,
        }
    }

    /// Support radius of the data pair.
    pub fn support_radius(&self) -> f64 {
        self.position
            .support_radius()
            .max(self.velocity.support_radius())
    }

    /// Initial energy by adaptive quadrature of the closed-form densities,
    /// independent of any grid:
    /// E = 2π ∫ (w_r² + w_t² + (2/(p+1))·|w|^{p+1}/r^{p−1}) dr with w = r·u₀.
    pub fn energy_quadrature(&self, params: &ModelParams, tol: f64) -> f64 {
        let coeff = params.potential_coefficient();
        let p = params.exponent().unwrap_or(3.0);
        let dens = |r: f64| {
            let u = self.position.value(r);
            let wr = u + r * self.position.slope(r);
            let wt = r * self.velocity.value(r);
            let pot = if coeff > 0.0 && r > 0.0 {
                coeff * math::abs_pow(r * u, p + 1.0) / math::abs_pow(r, p - 1.0)
            } else {
                0.0
            };
            wr * wr + wt * wt + pot
        };
        let upper = self.support_radius().max(1.0);
        2.0 * core::f64::consts::PI * math::adaptive_simpson(&dens, 0.0, upper, tol)
    }

    /// Untruncated tail energy of a power-tail displacement: the energy the
    /// uncut profile carries beyond the cutoff start, evaluated out to 10⁴
    /// cutoff radii. This is what the compactly supported run does not see;
    /// diagnostics compare it against their tolerances. Zero for shapes
    /// without truncation.
    pub fn truncation_tail_energy(&self, params: &ModelParams) -> f64 {
        let ProfileShape::PowerTail {
            amplitude,
            core_radius,
            exponent,
            cutoff_start,
        } = self.position
        else {
            return 0.0;
        };
        let coeff = params.potential_coefficient();
        let p = params.exponent().unwrap_or(3.0);
        let uncut = |r: f64| {
            let z = r / core_radius;
            let u = amplitude * math::powf(1.0 + z * z, -0.5 * exponent);
            let du = -exponent * amplitude * r / (core_radius * core_radius)
                * math::powf(1.0 + z * z, -0.5 * exponent - 1.0);
            let wr = u + r * du;
            let pot = if coeff > 0.0 && r > 0.0 {
                coeff * math::abs_pow(r * u, p + 1.0) / math::abs_pow(r, p - 1.0)
            } else {
                0.0
            };
            wr * wr + pot
        };
        let mut tail = 0.0;
        let mut a = cutoff_start;
        for factor in [2.0, 8.0, 64.0, 1024.0, 10000.0] {
            let b = cutoff_start * factor;
            tail += math::adaptive_simpson(&uncut, a, b, MOMENT_TOL);
            a = b;
        }
        2.0 * core::f64::consts::PI * tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_slope_and_moment(shape: &ProfileShape, radii: &[f64]) {
        for &r in radii {
            let h = 1e-5;
            let fd = (shape.value(r + h) - shape.value(r - h)) / (2.0 * h);
            assert!(
                math::abs(fd - shape.slope(r)) < 1e-7 * (1.0 + math::abs(fd)),
                "slope mismatch at r={r}: fd={fd}, closed={}",
                shape.slope(r)
            );
            let quad =
                math::adaptive_simpson(&|x| x * shape.value(x), 0.0, r, 1e-13);
            assert!(
                math::abs(quad - shape.radial_moment(r)) < 1e-9 * (1.0 + math::abs(quad)),
                "moment mismatch at r={r}: quad={quad}, closed={}",
                shape.radial_moment(r)
            );
        }
    }

    #[test]
    fn gaussian_closed_forms_match_quadrature() {
        let g = ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap();
        check_slope_and_moment(&g, &[0.5, 3.0, 5.0, 8.0, 16.9]);
        // Frozen against an independent scipy evaluation of the erf form.
        assert!(math::abs(g.radial_moment(3.0) - 0.14979547073634455) < 1e-12);
        assert!(math::abs(g.radial_moment(20.0) - 12.533141507163499) < 1e-12);
    }

    #[test]
    fn polynomial_closed_forms_match_quadrature() {
        let b = ProfileShape::polynomial(0.7, 4.0, 2.0).unwrap();
        check_slope_and_moment(&b, &[1.0, 3.1, 4.0, 5.5, 6.5]);
        assert_eq!(b.value(6.0), 0.0);
        assert_eq!(b.slope(6.0), 0.0);
    }

    #[test]
    fn power_tail_decay_class() {
        // q for p = 3, ε = 0.01: 2(p+4)/(p+1)² + ε = 0.885.
        let q = 2.0 * 7.0 / 16.0 + 0.01;
        assert!(math::abs(q - 0.885) < 1e-15);
        let t = ProfileShape::power_tail(1.0, 1.0, q, 30.0).unwrap();
        check_slope_and_moment(&t, &[0.5, 2.0, 10.0, 29.0, 31.0]);
        // Tail behaviour ~ r^{−q} before the cutoff.
        let ratio = t.value(20.0) / t.value(10.0);
        assert!(math::abs(ratio - math::powf(0.5, q)) < 0.01);
        assert_eq!(t.value(32.0), 0.0);
        // Truncated data keep a finite, positive energy.
        let profile = RadialProfile::static_data(t);
        let params = ModelParams::defocusing(3.0).unwrap();
        let e = profile.energy_quadrature(&params, 1e-10);
        assert!(e.is_finite() && e > 0.0);
        assert!(profile.truncation_tail_energy(&params) > 0.0);
    }

    #[test]
    fn sampled_shape_interpolates_between_nodes() {
        let dx = 0.05;
        let src = ProfileShape::gaussian(1.0, 2.0, 0.5).unwrap();
        let values: Vec<f64> = (0..=200).map(|i| src.value(i as f64 * dx)).collect();
        let s = ProfileShape::samples(values, dx).unwrap();
        for &r in &[0.7, 1.93, 2.5, 3.21] {
            assert!(math::abs(s.value(r) - src.value(r)) < 1e-5);
            assert!(math::abs(s.slope(r) - src.slope(r)) < 1e-3);
            assert!(math::abs(s.radial_moment(r) - src.radial_moment(r)) < 1e-4);
        }
        assert_eq!(s.value(11.0), 0.0);
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(ProfileShape::gaussian(1.0, 5.0, 0.0).is_err());
        assert!(ProfileShape::polynomial(1.0, -1.0, 2.0).is_err());
        assert!(ProfileShape::power_tail(1.0, 1.0, 0.3, 10.0).is_err());
        assert!(ProfileShape::samples(alloc::vec![0.0, 1.0], 0.1).is_err());
    }

    #[test]
    fn energy_quadrature_matches_frozen_standard_value() {
        // Standard scenario data, frozen with scipy/mpmath before the build:
        // E(gaussian A=1, r_c=5, σ=1; u₁=0; p=3) = 246.98010469840867.
        let profile =
            RadialProfile::static_data(ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap());
        let params = ModelParams::defocusing(3.0).unwrap();
        let e = profile.energy_quadrature(&params, 1e-10);
        assert!(
            math::abs(e - 246.98010469840867) < 1e-7,
            "energy quadrature {e}"
        );
        // Kinetic part only (linear-mode energy): 147.56069191603586.
        let el = profile.energy_quadrature(&ModelParams::linear(), 1e-10);
        assert!(math::abs(el - 147.56069191603586) < 1e-7);
    }
}
