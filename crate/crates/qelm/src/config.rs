//! JSON experiment configuration.
//!
//! A configuration names either a preset or one explicit experiment. Command
//! line flags override the matching fields.

use std::path::{Path, PathBuf};

use qelm_core::architectures::{ArchitectureKind, ArchitectureSpec, MeasurementBasis};
use qelm_core::dynamics::DynamicsProfile;
use qelm_core::learn::{ExperimentSettings, PinvCutoff};
use qelm_core::qcore::{Ensemble, HermitianObservable};
use qelm_core::targets::{Axis, TargetKind, TargetSpec};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Run-count multiplier applied to presets when none is given.
pub const DEFAULT_DESK_SCALE: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub explicit: Option<ExplicitExperiment>,
    /// Scales run counts, in `(0, 1]`.
    pub desk_scale: Option<f64>,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub samples: Option<usize>,
    #[serde(default)]
    pub big_compute: bool,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// One architecture, a target list and the protocol to learn them.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitExperiment {
    /// Written to the `preset` column.
    #[serde(default = "explicit_label")]
    pub label: String,
    pub architecture: ArchitectureConfig,
    pub targets: Vec<TargetConfig>,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    pub n_samples: usize,
    pub n_runs: usize,
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub input_ensemble: EnsembleConfig,
    pub regularization: Option<f64>,
    /// Relative pseudoinverse cutoff, or `"machine"`.
    pub pinv_cutoff: Option<CutoffConfig>,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
}

fn explicit_label() -> String {
    "explicit".into()
}

fn default_train_fraction() -> f64 {
    0.8
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureConfig {
    pub kind: String,
    #[serde(default = "one")]
    pub n: usize,
    pub input_qubits: usize,
    pub reservoir_qubits: usize,
    #[serde(default = "computational")]
    pub basis: String,
}

fn one() -> usize {
    1
}

fn computational() -> String {
    "computational".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub j_scale: f64,
    pub field: f64,
    pub time: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        let d = DynamicsProfile::ergodic();
        Self {
            j_scale: d.j_scale,
            field: d.field,
            time: d.time,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleConfig {
    #[default]
    Ginibre,
    HaarPure,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CutoffConfig {
    Relative(f64),
    Named(NamedCutoff),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedCutoff {
    Machine,
}

impl From<CutoffConfig> for PinvCutoff {
    fn from(c: CutoffConfig) -> Self {
        match c {
            CutoffConfig::Relative(x) => PinvCutoff::Relative(x),
            CutoffConfig::Named(NamedCutoff::Machine) => PinvCutoff::Machine,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisConfig {
    X,
    Y,
    Z,
}

/// Target functionals; Pauli strings use `I`, `X`, `Y`, `Z` per qubit.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    Pauli { string: String },
    Polynomial { string: String, degree: usize },
    Purity,
    Renyi { alpha: f64 },
    VonNeumann,
    Concurrence,
    Negativity,
    Bloch { axis: AxisConfig },
    MutualInformation { dim_a: usize, dim_b: usize },
}

impl ExperimentConfig {
    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> CliResult<()> {
        match (&self.preset, &self.explicit) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(CliError::usage(
                    "exactly one of `preset` and `explicit` must be given",
                ))
            }
        }
        if let Some(s) = self.desk_scale {
            check_desk_scale(s)?;
        }
        if self.runs == Some(0) {
            return Err(CliError::usage("--runs must be at least 1"));
        }
        if self.samples == Some(0) {
            return Err(CliError::usage("--samples must be at least 1"));
        }
        Ok(())
    }
}

pub fn check_desk_scale(s: f64) -> CliResult<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(CliError::usage(format!("desk scale {s} is outside (0, 1]")));
    }
    Ok(())
}

/// `⌊base · scale⌋`, at least one.
pub fn scaled_runs(base: usize, scale: f64) -> usize {
    ((base as f64 * scale).floor() as usize).max(1)
}

impl ArchitectureConfig {
    pub fn to_spec(&self, dynamics: DynamicsProfile) -> CliResult<ArchitectureSpec> {
        let kind: ArchitectureKind = self
            .kind
            .parse()
            .map_err(|_| CliError::usage(format!("unknown architecture `{}`", self.kind)))?;
        let basis: MeasurementBasis = self
            .basis
            .parse()
            .map_err(|_| CliError::usage(format!("unknown measurement basis `{}`", self.basis)))?;
        Ok(
            ArchitectureSpec::new(kind, self.n, self.input_qubits, self.reservoir_qubits)
                .with_dynamics(dynamics)
                .with_basis(basis),
        )
    }
}

impl From<DynamicsConfig> for DynamicsProfile {
    fn from(d: DynamicsConfig) -> Self {
        DynamicsProfile {
            j_scale: d.j_scale,
            field: d.field,
            time: d.time,
        }
    }
}

impl From<EnsembleConfig> for Ensemble {
    fn from(e: EnsembleConfig) -> Self {
        match e {
            EnsembleConfig::Ginibre => Ensemble::Ginibre,
            EnsembleConfig::HaarPure => Ensemble::HaarPure,
        }
    }
}

impl From<AxisConfig> for Axis {
    fn from(a: AxisConfig) -> Self {
        match a {
            AxisConfig::X => Axis::X,
            AxisConfig::Y => Axis::Y,
            AxisConfig::Z => Axis::Z,
        }
    }
}

impl TargetConfig {
    pub fn to_spec(&self) -> CliResult<TargetSpec> {
        let bad = |e: qelm_core::Error| CliError::usage(format!("invalid target {self:?}: {e}"));
        match self {
            TargetConfig::Pauli { string } => TargetSpec::pauli(string).map_err(bad),
            TargetConfig::Polynomial { string, degree } => {
                TargetSpec::pauli_polynomial(string, *degree).map_err(bad)
            }
            TargetConfig::Purity => Ok(TargetSpec::purity()),
            TargetConfig::Renyi { alpha } => TargetSpec::renyi(*alpha).map_err(bad),
            TargetConfig::VonNeumann => {
                TargetSpec::new("von_neumann", TargetKind::VonNeumann).map_err(bad)
            }
            TargetConfig::Concurrence => Ok(TargetSpec::concurrence()),
            TargetConfig::Negativity => Ok(TargetSpec::negativity()),
            TargetConfig::Bloch { axis } => Ok(TargetSpec::bloch((*axis).into())),
            TargetConfig::MutualInformation { dim_a, dim_b } => TargetSpec::new(
                "mutual_information",
                TargetKind::MutualInformation {
                    dim_a: *dim_a,
                    dim_b: *dim_b,
                },
            )
            .map_err(bad),
        }
    }
}

impl ExplicitExperiment {
    pub fn settings(&self) -> ExperimentSettings {
        ExperimentSettings {
            n_samples: self.n_samples,
            train_fraction: self.train_fraction,
            regularization: self.regularization,
            cutoff: self.pinv_cutoff.map(Into::into).unwrap_or_default(),
            input_ensemble: self.input_ensemble.into(),
            shuffle: false,
        }
    }
}

/// `Tr[O ρᵏ]` for an arbitrary observable.
pub fn observable_target(
    label: &str,
    observable: HermitianObservable,
    degree: usize,
) -> CliResult<TargetSpec> {
    TargetSpec::new(label, TargetKind::Polynomial { observable, degree })
        .map_err(|e| CliError::usage(format!("invalid target `{label}`: {e}")))
}
