//! Run configuration file: JSON schema and conversion to core types.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use qsv_core::linalg::{Matrix, C64};
use qsv_core::simulator::Mode;
use qsv_core::states::{SourceModel, TargetState};
use qsv_core::strategy::StrategyKind;

use crate::error::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChoice {
    Auto,
    Global,
    Singlet,
    Partial,
    Product,
}

impl From<StrategyChoice> for StrategyKind {
    fn from(c: StrategyChoice) -> Self {
        match c {
            StrategyChoice::Auto => StrategyKind::Auto,
            StrategyChoice::Global => StrategyKind::Global,
            StrategyChoice::Singlet => StrategyKind::Singlet,
            StrategyChoice::Partial => StrategyKind::Partial,
            StrategyChoice::Product => StrategyKind::Product,
        }
    }
}

/// Source description. Angles for `rotated` are in degrees, matching the
/// CLI's degree convention; `custom` points at a density-matrix JSON file
/// (4x4 array of [re, im] pairs, row-major).
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Pure,
    Werner { p: f64 },
    Rotated { alice_degrees: f64, bob_degrees: f64 },
    Custom { path: String },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    FixedEpsilon(f64),
    FixedDelta(f64),
}

impl From<ModeSpec> for Mode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::FixedEpsilon(v) => Mode::FixedEpsilon(v),
            ModeSpec::FixedDelta(v) => Mode::FixedDelta(v),
        }
    }
}

/// The `simulate`/`scaling` run configuration. `n_min` is only meaningful
/// for scaling sweeps, where the swept range is [n_min, n_max].
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub theta_degrees: f64,
    pub strategy: StrategyChoice,
    pub source: SourceSpec,
    pub mode: ModeSpec,
    pub n_max: u64,
    #[serde(default)]
    pub n_min: Option<u64>,
    pub trials: u64,
    pub seed: u64,
    pub output_path: String,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = fs::read_to_string(path)
            .map_err(|e| AppError::invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::invalid(format!("config {}: {e}", path.display())))
    }

    pub fn theta_radians(&self) -> f64 {
        self.theta_degrees.to_radians()
    }

    /// Builds the source model; `base` resolves a relative custom-density
    /// path against the config file's directory.
    pub fn source_model(&self, base: &Path) -> Result<SourceModel, AppError> {
        let target = TargetState::new(self.theta_radians())
            .map_err(|e| AppError::invalid(format!("theta_degrees: {e}")))?;
        match &self.source {
            SourceSpec::Pure => Ok(SourceModel::pure(target)),
            SourceSpec::Werner { p } => SourceModel::werner(target, *p)
                .map_err(|e| AppError::invalid(format!("source.p: {e}"))),
            SourceSpec::Rotated { alice_degrees, bob_degrees } => Ok(SourceModel::rotated(
                target,
                alice_degrees.to_radians(),
                bob_degrees.to_radians(),
            )),
            SourceSpec::Custom { path } => {
                let resolved = base.join(path);
                let state = load_density(&resolved)?;
                SourceModel::custom(target, state)
                    .map_err(|e| AppError::invalid(format!("source {}: {e}", resolved.display())))
            }
        }
    }
}

/// Parses a density matrix from JSON: a 4x4 array of [re, im] pairs,
/// row-major. Density invariants are enforced by the caller through
/// `SourceModel::custom`.
pub fn load_density(path: &Path) -> Result<Matrix, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::invalid(format!("cannot read density {}: {e}", path.display())))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
        .map_err(|e| AppError::invalid(format!("density {}: {e}", path.display())))?;
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(AppError::invalid(format!(
            "density {}: expected a 4x4 array of [re, im] pairs",
            path.display()
        )));
    }
    let entries = rows
        .iter()
        .flatten()
        .map(|[re, im]| C64::new(*re, *im))
        .collect();
    Matrix::from_entries(entries)
        .map_err(|e| AppError::invalid(format!("density {}: {e}", path.display())))
}
