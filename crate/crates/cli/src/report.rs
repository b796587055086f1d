//! Report assembly and persistence: verdicts with tolerances, JSON reports,
//! and the fixed-column CSV files.
//!
//! Outputs are deterministic: iteration orders are fixed, floats serialize as
//! shortest round-trip decimals, and the only wall-clock content is one
//! metadata field that `--seed-metadata-off` removes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use radwave_core::{FieldState, Trajectory};

/// Where a reported number comes from.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Computed from the run.
    Measured,
    /// A closed-form constant or bound.
    ClosedForm,
}

/// One pass/fail claim with its measured value and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    /// Stable identifier of the claim.
    pub name: String,
    /// Measured value.
    pub measured: f64,
    /// Bound the value is compared against.
    pub bound: f64,
    /// Relative slack applied to the bound.
    pub tolerance: f64,
    /// measured ≤ bound·(1 + tolerance) (or the documented direction).
    pub pass: bool,
    /// Origin of the bound.
    pub provenance: Provenance,
}

impl Verdict {
    /// Claim `measured ≤ bound·(1 + tolerance)`.
    pub fn upper(name: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            tolerance,
            pass: measured <= bound * (1.0 + tolerance) + f64::MIN_POSITIVE,
            provenance: Provenance::Measured,
        }
    }

    /// Claim `measured ≥ bound·(1 − tolerance)`.
    pub fn lower(name: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            tolerance,
            pass: measured >= bound * (1.0 - tolerance) - f64::MIN_POSITIVE,
            provenance: Provenance::Measured,
        }
    }

    /// Claim with an explicitly boolean outcome.
    pub fn flag(name: &str, measured: f64, bound: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            tolerance: 0.0,
            pass,
            provenance: Provenance::Measured,
        }
    }

    /// Mark the bound as a closed-form constant.
    pub fn closed_form(mut self) -> Self {
        self.provenance = Provenance::ClosedForm;
        self
    }
}

/// Report header; `created_unix` is the single wall-clock field.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    /// Package version.
    pub version: String,
    /// Seconds since the epoch at report creation, unless stripped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_unix: Option<u64>,
}

impl Metadata {
    /// Build the header; `stamped = false` strips the wall clock for
    /// bit-exact diffs.
    pub fn new(stamped: bool) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            created_unix: stamped.then(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
        }
    }
}

/// Print one line per verdict and return whether all passed.
pub fn print_verdicts(verdicts: &[Verdict]) -> bool {
    let mut all = true;
    for v in verdicts {
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {:<44} measured = {:>14.6e}  bound = {:>14.6e}  tol = {}",
            v.name, v.measured, v.bound, v.tolerance
        );
        all &= v.pass;
    }
    all
}

/// Write bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into())
    ));
    {
        let mut file =
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Serialize a report as pretty JSON and write it atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).context("serializing report")?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// State snapshots as CSV with the fixed columns (t, r, w, phi, psi).
pub fn write_states_csv(path: &Path, snapshots: &[FieldState]) -> anyhow::Result<()> {
    let mut out = csv::WriterBuilder::new().from_writer(Vec::new());
    out.write_record(["t", "r", "w", "phi", "psi"])?;
    for state in snapshots {
        for i in 0..state.len() {
            out.write_record(&[
                state.t.to_string(),
                state.radius(i).to_string(),
                state.w[i].to_string(),
                state.phi[i].to_string(),
                state.psi[i].to_string(),
            ])?;
        }
    }
    write_atomic(path, &out.into_inner()?)
}

/// Origin series as CSV with columns (t, u0_est, u0_est_richardson).
pub fn write_origin_csv(path: &Path, trajectory: &Trajectory) -> anyhow::Result<()> {
    let mut out = csv::WriterBuilder::new().from_writer(Vec::new());
    out.write_record(["t", "u0_est", "u0_est_richardson"])?;
    let series = &trajectory.origin_series;
    for n in 0..series.first.len() {
        out.write_record(&[
            (n as f64 * series.dt).to_string(),
            series.first[n].to_string(),
            series.richardson[n].to_string(),
        ])?;
    }
    write_atomic(path, &out.into_inner()?)
}

/// Radiation profile as CSV with columns (label, g, error_estimate).
pub fn write_radiation_csv(
    path: &Path,
    profile: &radwave_core::RadiationProfile,
) -> anyhow::Result<()> {
    let mut out = csv::WriterBuilder::new().from_writer(Vec::new());
    out.write_record(["label", "g", "error_estimate"])?;
    for k in 0..profile.labels.len() {
        out.write_record(&[
            profile.labels[k].to_string(),
            profile.values[k].to_string(),
            profile.error_estimates[k].to_string(),
        ])?;
    }
    write_atomic(path, &out.into_inner()?)
}

/// Output path helper.
pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
