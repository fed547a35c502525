//! TOML run configuration. Every field is optional; each command reads the
//! ones it needs and rejects a config that lacks them.

use std::path::Path;

use qms_core::families;
use qms_core::io::{MeasurementSpec, StateSpec};
use qms_core::quantum::ProjectiveMeasurement;
use qms_core::steering::{self, icosahedron_family, planar_family, sphere_family, MeasurementPair, StateFamily};
use qms_core::tensor::{LhvModel, TensorShape};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub state: Option<StateSpec>,
    /// Settings of party A; paired index-wise with `bob` for steering.
    pub alice: Option<Vec<MeasurementSpec>>,
    pub bob: Option<Vec<MeasurementSpec>>,
    pub observables: Option<Vec<MeasurementSpec>>,
    pub preset: Option<PresetSpec>,
    pub direction: Option<DirectionChoice>,
    pub mode: Option<ChshMode>,
    pub lhv: Option<LhvSpec>,
    pub visibility: Option<f64>,
    pub family: Option<FamilySpec>,
    /// Family sizes for `scan` over planar or sphere presets, or the three
    /// continuum sizes of `table1`.
    pub sizes: Option<Vec<usize>>,
    /// Pre-scan grid intervals for threshold searches.
    pub grid: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn settings(specs: &[MeasurementSpec]) -> Result<Vec<ProjectiveMeasurement>, CliError> {
        Ok(specs.iter().map(MeasurementSpec::build).collect::<Result<_, _>>()?)
    }

    /// Observable list from `observables` or `preset`, exactly one of which
    /// must be present.
    pub fn observable_set(&self) -> Result<Vec<ProjectiveMeasurement>, CliError> {
        match (&self.observables, &self.preset) {
            (Some(list), None) => Self::settings(list),
            (None, Some(preset)) => preset.build(None),
            (Some(_), Some(_)) => Err(CliError::Config("give either `observables` or `preset`, not both".into())),
            (None, None) => Err(CliError::Config("missing `observables` or `preset`".into())),
        }
    }

    /// Explicit `alice`/`bob` pairs, or a preset paired the way the family
    /// (Werner by default) correlates outcomes.
    pub fn pairs(&self) -> Result<Vec<MeasurementPair>, CliError> {
        match (&self.alice, &self.bob) {
            (Some(a), Some(b)) => {
                if a.len() != b.len() {
                    return Err(CliError::Config(format!("{} settings for A but {} for B", a.len(), b.len())));
                }
                let a = Self::settings(a)?;
                let b = Self::settings(b)?;
                Ok(a.into_iter().zip(b).map(|(a, b)| MeasurementPair::new(a, b)).collect())
            }
            (None, None) => {
                let obs = self.observable_set()?;
                Ok(match self.family {
                    Some(FamilySpec::Isotropic { .. }) => steering::isotropic_pairs(&obs),
                    _ => steering::werner_pairs(&obs),
                })
            }
            _ => Err(CliError::Config("`alice` and `bob` must be given together".into())),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PresetSpec {
    Xy {},
    Mub { dim: usize },
    Icosahedron {},
    Planar { n: usize },
    Sphere { n: usize },
}

impl PresetSpec {
    /// Builds the preset, with `n` overriding the size of sized families.
    pub fn build(&self, n: Option<usize>) -> Result<Vec<ProjectiveMeasurement>, CliError> {
        Ok(match self {
            Self::Xy {} => vec![ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()],
            Self::Mub { dim } => families::mub_family(*dim)?,
            Self::Icosahedron {} => icosahedron_family(),
            Self::Planar { n: default } => planar_family(n.unwrap_or(*default))?,
            Self::Sphere { n: default } => sphere_family(n.unwrap_or(*default))?,
        })
    }

    pub fn is_sized(&self) -> bool {
        matches!(self, Self::Planar { .. } | Self::Sphere { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionChoice {
    #[default]
    ASteersB,
    BSteersA,
    Both,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshMode {
    #[default]
    Quantum,
    Lhv,
    RandomTensor,
}

/// Deterministic hidden-variable strategies mixed with `weights`;
/// `outcomes[λ][party][setting]` is a 0-based outcome index.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LhvSpec {
    pub weights: Vec<f64>,
    pub outcomes: Vec<Vec<Vec<usize>>>,
}

impl LhvSpec {
    pub fn build(&self, shape: &TensorShape) -> Result<LhvModel, CliError> {
        if self.weights.len() != self.outcomes.len() {
            return Err(CliError::Config(format!(
                "{} weights for {} strategies",
                self.weights.len(),
                self.outcomes.len()
            )));
        }
        let responses = self
            .outcomes
            .iter()
            .map(|strategy| {
                let model = LhvModel::deterministic(shape, strategy)?;
                Ok(model.responses()[0].clone())
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(LhvModel::new(self.weights.clone(), responses)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    QubitWerner {},
    QutritWerner {},
    Isotropic { dim: usize },
}

impl FamilySpec {
    pub fn build(&self) -> StateFamily {
        match self {
            Self::QubitWerner {} => StateFamily::qubit_werner(),
            Self::QutritWerner {} => StateFamily::qutrit_werner(),
            Self::Isotropic { dim } => StateFamily::isotropic(*dim),
        }
    }
}
