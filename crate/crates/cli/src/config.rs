//! Scenario configuration: a single TOML file with a strict schema.
//!
//! Unknown keys are rejected everywhere so a typo in an exponent name cannot
//! silently fall back to a default. Cross-field constraints (exponent
//! orderings, admissible windows) are validated at load time; lattice
//! alignment of probe coordinates is checked when the probes are built
//! against the grid.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use radwave_core::{critical_exponents, GridSpec, ModelParams, ProfileShape, RadialProfile};

/// Top-level scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Equation selection.
    pub model: ModelSection,
    /// Lattice extents.
    pub grid: GridSection,
    /// Initial data.
    pub profile: ProfileSection,
    /// Probe registrations (traces, snapshots, boards, regions).
    #[serde(default)]
    pub probes: ProbeSection,
    /// Flux-verification suite.
    #[serde(default)]
    pub flux: Option<FluxSection>,
    /// Morawetz radii.
    #[serde(default)]
    pub morawetz: Option<MorawetzSection>,
    /// Scattering diagnostics.
    #[serde(default)]
    pub scattering: Option<ScatteringSection>,
    /// Retarded-vs-escaping ledgers.
    #[serde(default, rename = "theorem2")]
    pub ledgers: Vec<LedgerSection>,
    /// Convergence study.
    #[serde(default)]
    pub convergence: Option<ConvergenceSection>,
    /// Output controls.
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// "defocusing" or "linear".
    pub kind: String,
    /// Nonlinearity exponent, required for the defocusing model.
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Radial (and time) step.
    pub dr: f64,
    /// Outer radius.
    pub r_max: f64,
    /// Final time.
    pub t_end: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    /// Displacement shape u₀.
    pub u0: ShapeSection,
    /// Velocity shape u₁; defaults to zero.
    #[serde(default)]
    pub u1: Option<ShapeSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSection {
    /// One of "zero", "gaussian_bump", "polynomial_bump", "power_tail",
    /// "custom_samples".
    pub kind: String,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Tail exponent q (power_tail).
    #[serde(default)]
    pub exponent: Option<f64>,
    /// Truncation radius (power_tail).
    #[serde(default)]
    pub truncation: Option<f64>,
    /// Sample values (custom_samples), spaced by the grid step.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Outgoing characteristic labels τ.
    #[serde(default)]
    pub outgoing: Vec<f64>,
    /// Incoming characteristic labels s.
    #[serde(default)]
    pub incoming: Vec<f64>,
    /// Snapshot times.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Snapshot stride in steps.
    #[serde(default)]
    pub snapshot_stride: Option<usize>,
    /// Record per-label outgoing board.
    #[serde(default)]
    pub radiation_board: bool,
    /// Record per-label incoming board.
    #[serde(default)]
    pub incoming_board: bool,
    /// Radii watched every step.
    #[serde(default)]
    pub watch_radii: Vec<f64>,
    /// Annulus parameter pairs evaluated at snapshot times.
    #[serde(default)]
    pub annuli: Vec<AnnulusSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusSection {
    /// Inner cone speed c ∈ (0, 1).
    pub c: f64,
    /// Retardation exponent β ∈ (0, β₀(p)).
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSection {
    /// Rectangles (r1, r2, t1, t2) in physical units.
    #[serde(default)]
    pub rectangles: Vec<[f64; 4]>,
    /// Light triangles (t0, r0).
    #[serde(default)]
    pub triangles: Vec<[f64; 2]>,
    /// Cone trapezoids (t1, t2, s).
    #[serde(default)]
    pub trapezoids: Vec<[f64; 3]>,
    /// Incoming parallelograms (t0, s, s2).
    #[serde(default)]
    pub parallelograms: Vec<[f64; 3]>,
    /// Refinement ladder of dr values, coarsest first.
    pub refinements: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorawetzSection {
    /// Radii R of the centered inequality.
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringSection {
    /// Anchor τ₀ (and s₀ on the reversed side) of the exterior comparison.
    #[serde(default)]
    pub anchor: f64,
    /// Times at which the exterior mismatch is evaluated.
    pub comparison_times: Vec<f64>,
    /// Outgoing label for the decay-rate fit.
    #[serde(default)]
    pub decay_label: f64,
    /// Absolute-time window of the decay fit.
    pub decay_window: [f64; 2],
    /// Label windows for the origin-throughput bound.
    #[serde(default)]
    pub appendix_windows: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerSection {
    /// Radius R.
    pub r: f64,
    /// Retardation exponent β.
    pub beta: f64,
    /// Weight exponent κ.
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Refinement ladder of dr values, coarsest first (≥ 3 levels).
    pub refinements: Vec<f64>,
    /// Checkpoints (r, t) compared across levels.
    pub checkpoints: Vec<[f64; 2]>,
    /// Study outer radius.
    pub r_max: f64,
    /// Study final time.
    pub t_end: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory.
    #[serde(default = "default_out_dir")]
    pub dir: String,
    /// Snapshot stride used for the states file.
    #[serde(default)]
    pub stride: Option<usize>,
    /// Output formats: "csv", "json".
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_out_dir() -> String {
    "out".into()
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            stride: None,
            formats: default_formats(),
        }
    }
}

impl ScenarioConfig {
    /// Parse and validate a TOML scenario.
    pub fn parse_str(text: &str) -> anyhow::Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).context("parsing scenario TOML")?;
        config.validate()?;
        Ok(config)
    }

    /// Load from a file path.
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse_str(&text)
    }

    /// Model parameters.
    pub fn params(&self) -> anyhow::Result<ModelParams> {
        match self.model.kind.as_str() {
            "linear" => {
                if self.model.p.is_some() {
                    bail!("model.p is meaningless for the linear model; remove it");
                }
                Ok(ModelParams::linear())
            }
            "defocusing" => {
                let p = self
                    .model
                    .p
                    .context("model.p is required for the defocusing model")?;
                Ok(ModelParams::defocusing(p).map_err(anyhow::Error::msg)?)
            }
            other => bail!("unknown model.kind {other:?}; use \"defocusing\" or \"linear\""),
        }
    }

    /// Lattice.
    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        GridSpec::new(self.grid.dr, self.grid.r_max, self.grid.t_end).map_err(anyhow::Error::msg)
    }

    /// Initial data.
    pub fn profile(&self) -> anyhow::Result<RadialProfile> {
        let u0 = build_shape(&self.profile.u0, self.grid.dr).context("profile.u0")?;
        let u1 = match &self.profile.u1 {
            Some(section) => build_shape(section, self.grid.dr).context("profile.u1")?,
            None => ProfileShape::Zero,
        };
        Ok(RadialProfile::new(u0, u1))
    }

    fn validate(&self) -> anyhow::Result<()> {
        let params = self.params()?;
        self.grid()?;
        self.profile()?;

        if let Some(exps) = params.exponent().map(|_| critical_exponents(&params).unwrap()) {
            for annulus in &self.probes.annuli {
                if !(0.0 < annulus.c && annulus.c < 1.0) {
                    bail!("probes.annuli.c = {} must lie in (0, 1)", annulus.c);
                }
                if !(0.0 < annulus.beta && annulus.beta < exps.beta_sup) {
                    bail!(
                        "probes.annuli.beta = {} must lie in (0, {})",
                        annulus.beta,
                        exps.beta_sup
                    );
                }
            }
            for ledger in &self.ledgers {
                if !(ledger.kappa > exps.kappa_inf && ledger.kappa < 1.0) {
                    bail!(
                        "theorem2.kappa = {} must lie in ({}, 1)",
                        ledger.kappa,
                        exps.kappa_inf
                    );
                }
                if !(ledger.beta > 1.0 - ledger.kappa && ledger.beta < exps.beta_sup) {
                    bail!(
                        "theorem2.beta = {} must lie in ({}, {})",
                        ledger.beta,
                        1.0 - ledger.kappa,
                        exps.beta_sup
                    );
                }
                if ledger.r > self.grid.t_end {
                    bail!(
                        "theorem2 ledger at R = {} needs t_end >= R (run has {})",
                        ledger.r,
                        self.grid.t_end
                    );
                }
            }
        } else if !self.ledgers.is_empty() || !self.probes.annuli.is_empty() {
            bail!("annuli and theorem2 ledgers need the defocusing model");
        }

        if let Some(morawetz) = &self.morawetz {
            for &r in &morawetz.radii {
                if self.grid.t_end < 2.0 * r {
                    bail!(
                        "morawetz radius R = {r} is truncated: horizon t_end = {} is below 2R",
                        self.grid.t_end
                    );
                }
            }
        }

        if let Some(conv) = &self.convergence {
            if conv.refinements.len() < 3 {
                bail!(
                    "convergence.refinements needs at least 3 levels, got {}",
                    conv.refinements.len()
                );
            }
        }

        if let Some(flux) = &self.flux {
            if flux.refinements.is_empty() {
                bail!("flux.refinements must not be empty");
            }
        }

        for format in &self.output.formats {
            if format != "csv" && format != "json" {
                bail!("unknown output format {format:?}; use \"csv\" or \"json\"");
            }
        }
        Ok(())
    }
}

fn build_shape(section: &ShapeSection, dr: f64) -> anyhow::Result<ProfileShape> {
    let need = |v: Option<f64>, name: &str| {
        v.with_context(|| format!("field {name} is required for kind {:?}", section.kind))
    };
    match section.kind.as_str() {
        "zero" => Ok(ProfileShape::Zero),
        "gaussian_bump" => ProfileShape::gaussian(
            need(section.amplitude, "amplitude")?,
            need(section.center, "center")?,
            need(section.sigma, "sigma")?,
        )
        .map_err(anyhow::Error::msg),
        "polynomial_bump" => ProfileShape::polynomial(
            need(section.amplitude, "amplitude")?,
            need(section.center, "center")?,
            need(section.sigma, "sigma")?,
        )
        .map_err(anyhow::Error::msg),
        "power_tail" => ProfileShape::power_tail(
            need(section.amplitude, "amplitude")?,
            need(section.sigma, "sigma")?,
            need(section.exponent, "exponent")?,
            need(section.truncation, "truncation")?,
        )
        .map_err(anyhow::Error::msg),
        "custom_samples" => {
            let values = section
                .values
                .clone()
                .context("field values is required for kind \"custom_samples\"")?;
            ProfileShape::samples(values, dr).map_err(anyhow::Error::msg)
        }
        other => bail!(
            "unknown profile kind {other:?}; use zero, gaussian_bump, polynomial_bump, power_tail, or custom_samples"
        ),
    }
}
