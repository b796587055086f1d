//! Error type shared by all solver and diagnostic operations.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by configuration checks, lattice alignment, and the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    Domain(String),
    /// A scenario-level constraint is violated (grid too small, bad window, ...).
    Config(String),
    /// A quantity is off the space-time lattice where it must lie on it.
    Misaligned(String),
    /// Inputs contradict each other (e.g. zero energy with a nonzero state).
    Inconsistent(String),
    /// The integrator produced a non-finite value.
    Diverged {
        /// Index of the step at which the non-finite value appeared.
        step: usize,
    },
    /// A requested probe, snapshot, or trace was not registered before the run.
    MissingProbe(String),
    /// The run horizon is too short for the requested diagnostic.
    InsufficientHorizon(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Misaligned(msg) => write!(f, "lattice alignment error: {msg}"),
            Error::Inconsistent(msg) => write!(f, "inconsistent input: {msg}"),
            Error::Diverged { step } => {
                write!(f, "non-finite value detected at step {step} (divergence)")
            }
            Error::MissingProbe(msg) => write!(f, "missing probe: {msg}"),
            Error::InsufficientHorizon(msg) => write!(f, "insufficient horizon: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
