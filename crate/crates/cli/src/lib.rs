//! Batch driver for the radial defocusing wave laboratory: configuration
//! schema, scenario assembly, commands, and deterministic report emission.

pub mod commands;
pub mod config;
pub mod report;
pub mod scenario;
