//! JSON and CSV encodings.
//!
//! Complex entries are `[re, im]` pairs in row-major order. State and
//! measurement specs deserialize from any serde format, so the same shapes
//! work in JSON documents and TOML run configs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families;
use crate::linalg::ComplexMatrix;
use crate::majorization::MajorizationBound;
use crate::quantum::{DensityMatrix, JointDistribution, ProjectiveMeasurement, QuantumError};
use crate::steering::{CriterionReport, Direction};
use crate::tensor::{MagicSquareTensor, TensorError, TensorShape};
use crate::C64;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Quantum(#[from] QuantumError),

    #[error(transparent)]
    Tensor(#[from] TensorError),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, IoError>;

fn to_pairs(entries: &[C64]) -> Vec<[f64; 2]> {
    entries.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|p| C64::new(p[0], p[1])).collect()
}

/// Explicit density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub party_dims: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for StateJson {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            party_dims: rho.party_dims().to_vec(),
            entries: to_pairs(rho.matrix().entries()),
        }
    }
}

impl StateJson {
    pub fn build(&self) -> Result<DensityMatrix> {
        let m = ComplexMatrix::from_row_major(from_pairs(&self.entries)).map_err(QuantumError::from)?;
        Ok(DensityMatrix::new(m, self.party_dims.clone())?)
    }
}

/// A named state family or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    Singlet {},
    Ghz {},
    QubitWerner { eta: f64 },
    QutritWerner { eta: f64 },
    Isotropic { dim: usize, eta: f64 },
    /// Product of pure qubit states given by Bloch vectors.
    Product { bloch: Vec<[f64; 3]> },
    Matrix { party_dims: Vec<usize>, entries: Vec<[f64; 2]> },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        Ok(match self {
            Self::Singlet {} => families::singlet(),
            Self::Ghz {} => families::ghz(),
            Self::QubitWerner { eta } => families::qubit_werner(*eta)?,
            Self::QutritWerner { eta } => families::qutrit_werner(*eta)?,
            Self::Isotropic { dim, eta } => families::isotropic(*dim, *eta)?,
            Self::Product { bloch } => {
                let parts = bloch
                    .iter()
                    .map(|n| families::bloch_state(*n))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                families::product(&parts).ok_or_else(|| IoError::Invalid("empty product".into()))?
            }
            Self::Matrix { party_dims, entries } => StateJson {
                party_dims: party_dims.clone(),
                entries: entries.clone(),
            }
            .build()?,
        })
    }
}

/// A projective measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasurementSpec {
    /// `"x"`, `"y"` or `"z"`.
    Pauli { axis: String },
    Bloch { direction: [f64; 3] },
    /// Computational basis of a `dim`-level system.
    Computational { dim: usize },
    /// Basis `index` of the complete MUB family of dimension `dim`.
    Mub { dim: usize, index: usize },
    /// Orthonormal basis vectors, optionally labelled.
    Basis {
        vectors: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        labels: Option<Vec<f64>>,
    },
    /// Non-degenerate Hermitian observable, row-major.
    Observable { entries: Vec<[f64; 2]> },
}

impl MeasurementSpec {
    pub fn build(&self) -> Result<ProjectiveMeasurement> {
        Ok(match self {
            Self::Pauli { axis } => match axis.as_str() {
                "x" => ProjectiveMeasurement::pauli_x(),
                "y" => ProjectiveMeasurement::pauli_y(),
                "z" => ProjectiveMeasurement::pauli_z(),
                other => return Err(IoError::Invalid(format!("unknown Pauli axis {other:?}"))),
            },
            Self::Bloch { direction } => ProjectiveMeasurement::bloch(*direction)?,
            Self::Computational { dim } => ProjectiveMeasurement::computational(*dim),
            Self::Mub { dim, index } => {
                let family = families::mub_family(*dim)?;
                let n = family.len();
                family
                    .into_iter()
                    .nth(*index)
                    .ok_or_else(|| IoError::Invalid(format!("MUB index {index} outside 0..{n}")))?
            }
            Self::Basis { vectors, labels } => {
                let vectors = vectors.iter().map(|v| from_pairs(v)).collect();
                match labels {
                    Some(l) => ProjectiveMeasurement::from_basis(vectors, l.clone())?,
                    None => ProjectiveMeasurement::from_basis_unlabelled(vectors)?,
                }
            }
            Self::Observable { entries } => {
                let m = ComplexMatrix::from_row_major(from_pairs(entries)).map_err(QuantumError::from)?;
                ProjectiveMeasurement::from_observable(&m)?
            }
        })
    }
}

/// Serialized measurement: basis vectors and labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementJson {
    pub dim: usize,
    pub vectors: Vec<Vec<[f64; 2]>>,
    pub labels: Vec<f64>,
}

impl From<&ProjectiveMeasurement> for MeasurementJson {
    fn from(m: &ProjectiveMeasurement) -> Self {
        Self {
            dim: m.dim(),
            vectors: m.vectors().iter().map(|v| to_pairs(v)).collect(),
            labels: m.labels().to_vec(),
        }
    }
}

impl MeasurementJson {
    pub fn build(&self) -> Result<ProjectiveMeasurement> {
        if self.vectors.iter().any(|v| v.len() != self.dim) {
            return Err(IoError::Invalid("basis vector length differs from dim".into()));
        }
        let vectors = self.vectors.iter().map(|v| from_pairs(v)).collect();
        Ok(ProjectiveMeasurement::from_basis(vectors, self.labels.clone())?)
    }
}

/// Shape header plus flat values in the tensor's row-major layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub shape: TensorShape,
    pub values: Vec<f64>,
}

impl From<&MagicSquareTensor> for TensorJson {
    fn from(t: &MagicSquareTensor) -> Self {
        Self {
            shape: t.shape().clone(),
            values: t.values().to_vec(),
        }
    }
}

impl TensorJson {
    pub fn build(&self) -> Result<MagicSquareTensor> {
        let shape = TensorShape::new(self.shape.outcomes().to_vec())?;
        Ok(MagicSquareTensor::new(shape, self.values.clone())?)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// One row per outcome tuple: `o1,…,on,probability`, 0-based outcomes.
pub fn marginal_csv(joint: &JointDistribution) -> String {
    let arity = joint.outcome_counts().len();
    let mut out = String::new();
    for p in 1..=arity {
        let _ = write!(out, "o{p},");
    }
    out.push_str("probability\n");
    for (flat, v) in joint.values().iter().enumerate() {
        for i in joint.unflatten(flat) {
            let _ = write!(out, "{i},");
        }
        let _ = writeln!(out, "{v:.17e}");
    }
    out
}

/// `k,s_k,S_k` rows.
pub fn bound_csv(bound: &MajorizationBound) -> String {
    let mut out = String::from("k,s_k,S_k\n");
    for (k, (s, sk)) in bound.s().iter().zip(bound.partial_sums()).enumerate() {
        let _ = writeln!(out, "{},{s:.15},{sk:.15}", k + 1);
    }
    out
}

pub fn direction_label(direction: Direction) -> &'static str {
    match direction {
        Direction::ASteersB => "a-steers-b",
        Direction::BSteersA => "b-steers-a",
    }
}

/// `direction,k,lhs_partial,bound_partial,slack` rows; unconstrained `k`
/// leave the last two fields empty.
pub fn report_csv(reports: &[CriterionReport]) -> String {
    let mut out = String::from("direction,k,lhs_partial,bound_partial,slack\n");
    for report in reports {
        let d = direction_label(report.direction);
        for (k, a, b, slack) in report.rows() {
            match (b, slack) {
                (Some(b), Some(s)) => {
                    let _ = writeln!(out, "{d},{k},{a:.15},{b:.15},{s:.15}");
                }
                _ => {
                    let _ = writeln!(out, "{d},{k},{a:.15},,");
                }
            }
        }
    }
    out
}
