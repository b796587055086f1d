//! Command implementations. Each returns whether all verdicts passed.

pub mod convergence;
pub mod scattering;
pub mod simulate;
pub mod verify_flux;
pub mod verify_morawetz;
