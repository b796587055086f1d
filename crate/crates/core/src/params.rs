//! Model parameters, the reduced nonlinearity, and critical-exponent
//! arithmetic.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;

/// Admissible exponent range for the defocusing nonlinearity.
pub const P_MIN: f64 = 3.0;
/// Exclusive upper end of the admissible exponent range.
pub const P_MAX: f64 = 5.0;

/// Right-hand side selection for the reduced equation
/// wₜₜ − wᵣᵣ = −|w|^{p−1}w / r^{p−1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// Free wave: the source term and the potential energy are identically 0.
    Linear,
    /// Defocusing power nonlinearity with exponent `p`, 3 ≤ p < 5.
    Defocusing {
        /// Nonlinearity exponent.
        p: f64,
    },
}

/// Model parameters of a scenario. Plain value type, safe to share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    nonlinearity: Nonlinearity,
}

impl ModelParams {
    /// Defocusing model with exponent `p`; rejects `p` outside [3, 5).
    pub fn defocusing(p: f64) -> Result<Self> {
        if !(P_MIN..P_MAX).contains(&p) {
            return Err(Error::Domain(format!(
                "nonlinearity exponent p = {p} outside the admissible interval [{P_MIN}, {P_MAX})"
            )));
        }
        Ok(Self {
            nonlinearity: Nonlinearity::Defocusing { p },
        })
    }

    /// Free-wave model (nonlinearity disabled).
    pub fn linear() -> Self {
        Self {
            nonlinearity: Nonlinearity::Linear,
        }
    }

    /// The selected right-hand side.
    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    /// Exponent `p`, if the model is defocusing.
    pub fn exponent(&self) -> Option<f64> {
        match self.nonlinearity {
            Nonlinearity::Linear => None,
            Nonlinearity::Defocusing { p } => Some(p),
        }
    }

    /// True when the source term is disabled.
    pub fn is_linear(&self) -> bool {
        matches!(self.nonlinearity, Nonlinearity::Linear)
    }

    /// Coefficient 2/(p+1) of the potential-energy integrand
    /// |w|^{p+1}/r^{p−1}; zero in linear mode.
    pub fn potential_coefficient(&self) -> f64 {
        match self.nonlinearity {
            Nonlinearity::Linear => 0.0,
            Nonlinearity::Defocusing { p } => 2.0 / (p + 1.0),
        }
    }
}

/// Exponents derived from `p` that control the asymptotic statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponents {
    /// Critical Sobolev regularity s = 3/2 − 2/(p−1) (scaling invariance).
    pub sobolev: f64,
    /// Supremum 2(p−2)/(p+1) of admissible retardation exponents β.
    pub beta_sup: f64,
    /// Infimum (5−p)/(p+1) of admissible decay-weight exponents κ;
    /// equals 1 − `beta_sup` exactly.
    pub kappa_inf: f64,
}

/// Closed-form critical exponents for a defocusing model.
///
/// Errors on a linear model, where the exponents are undefined.
pub fn critical_exponents(params: &ModelParams) -> Result<CriticalExponents> {
    match params.nonlinearity() {
        Nonlinearity::Linear => Err(Error::Domain(
            "critical exponents are undefined for the linear model".into(),
        )),
        Nonlinearity::Defocusing { p } => {
            let beta_sup = 2.0 * (p - 2.0) / (p + 1.0);
            Ok(CriticalExponents {
                sobolev: 1.5 - 2.0 / (p - 1.0),
                beta_sup,
                kappa_inf: 1.0 - beta_sup,
            })
        }
    }
}

/// Reduced nonlinearity N(w, r) = |w|^{p−1}w / r^{p−1} for r > 0.
///
/// The value at r = 0 is the continuous extension 0: along admissible states
/// w ≈ r·u with bounded u, so N ≈ r·|u|^{p−1}u vanishes at the origin.
/// In linear mode the result is identically 0.
pub fn nonlinearity(w_val: f64, r: f64, params: &ModelParams) -> f64 {
    debug_assert!(r >= 0.0);
    match params.nonlinearity() {
        Nonlinearity::Linear => 0.0,
        Nonlinearity::Defocusing { p } => {
            if r <= 0.0 {
                0.0
            } else {
                math::signed_pow(w_val, p - 1.0) / math::abs_pow(r, p - 1.0)
            }
        }
    }
}
