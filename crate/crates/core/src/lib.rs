//! Numerical laboratory for the radial defocusing semilinear wave equation
//!
//! ∂²ₜu − Δu = −|u|^{p−1}u on ℝ³, with radial finite-energy data and
//! 3 ≤ p < 5. The radial reduction w(r,t) = r·u(r,t) turns the problem into
//! a 1D wave equation with the source term |w|^{p−1}w / r^{p−1} on the half
//! line, which this crate integrates with an exact-transport characteristic
//! scheme (dt = dr) and instruments with energy, flux, Morawetz, and
//! scattering diagnostics.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature to drop the standard library. File formats, configuration,
//! and the command-line driver live in the companion `radwave-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod bounds;
pub mod dalembert;
pub mod energy;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod math;
pub mod morawetz;
pub mod params;
pub mod profile;
pub mod region;
pub mod scattering;
pub mod state;
pub mod trajectory;

pub use bounds::{pointwise_bound_report, BoundReport};
pub use dalembert::{dalembert_linear, FreePoint};
pub use energy::{
    energy_of_state, flux_segment, mu_accumulate, partition_energies, EnergyPartition, FluxKind,
    FluxSegment,
};
pub use error::{Error, Result};
pub use evolve::{
    convergence_study, reverse_time, run, step, two_sided_run, ConvergenceReport, StudySpec,
};
pub use grid::GridSpec;
pub use morawetz::{morawetz_report, MorawetzReport};
pub use params::{critical_exponents, nonlinearity, CriticalExponents, ModelParams, Nonlinearity};
pub use profile::{ProfileShape, RadialProfile};
pub use region::{
    energy_identity_check, flux_identity_residual, triangle_law_report, EnergyIdentityReport,
    FluxFamily, FluxIdentityReport, PolygonRegion, TriangleLawReport,
};
pub use scattering::{
    annulus_energy, appendix_inequalities, decay_fit, exterior_difference, extract_g,
    free_wave_eval, theorem2_ledger, weighted_energy, AnnulusReport, AppendixReport, DecayFit,
    RadiationKind, RadiationProfile, Theorem2Ledger,
};
pub use state::{init_state, FieldState};
pub use trajectory::{
    CharacteristicTrace, ProbeSet, TraceKind, Trajectory, TwoSidedTrajectory,
};
