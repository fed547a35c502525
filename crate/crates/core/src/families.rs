//! Canonical states and measurement bases.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::linalg::ComplexMatrix;
use crate::quantum::{DensityMatrix, ProjectiveMeasurement, QuantumError, Result};

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) || eta.is_nan() {
        return Err(QuantumError::ParameterOutOfRange { name: "eta", value: eta });
    }
    Ok(())
}

fn basis_vector(dim: usize, i: usize) -> Vec<C64> {
    (0..dim).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
}

/// Antisymmetric `(|ij⟩ - |ji⟩)/√2` on `d ⊗ d`.
fn antisymmetric_pair(d: usize, i: usize, j: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    v[i * d + j] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[j * d + i] = C64::new(-FRAC_1_SQRT_2, 0.0);
    v
}

/// `(1-η)/d² · 1 + η |v⟩⟨v|`.
fn noisy_pure(d: usize, eta: f64, v: &[C64]) -> Result<DensityMatrix> {
    check_eta(eta)?;
    let dim = d * d;
    let noise = ComplexMatrix::identity(dim).scale((1.0 - eta) / dim as f64);
    let pure = ComplexMatrix::outer(v).scale(eta);
    DensityMatrix::new(&noise + &pure, vec![d, d])
}

/// Two-qubit singlet `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> DensityMatrix {
    qubit_werner(1.0).expect("η = 1 is valid")
}

/// Qubit Werner state `(1-η)/4 · 1⊗1 + η |ψ⁻⟩⟨ψ⁻|`.
pub fn qubit_werner(eta: f64) -> Result<DensityMatrix> {
    noisy_pure(2, eta, &antisymmetric_pair(2, 0, 1))
}

/// Isotropic state `(1-η)/d² · 1⊗1 + η |ψ⁺⟩⟨ψ⁺|` with `|ψ⁺⟩ = Σ|ii⟩/√d`.
pub fn isotropic(d: usize, eta: f64) -> Result<DensityMatrix> {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    noisy_pure(d, eta, &v)
}

/// Qutrit Werner state `(1-η)/9 · 1⊗1 + (η/3) Σ_{i<j} |ψ⁻_ij⟩⟨ψ⁻_ij|`.
///
/// The mixture over the three antisymmetric pairs is the normalized
/// projector onto the antisymmetric subspace.
pub fn qutrit_werner(eta: f64) -> Result<DensityMatrix> {
    check_eta(eta)?;
    let mut m = ComplexMatrix::identity(9).scale((1.0 - eta) / 9.0);
    for i in 0..3 {
        for j in (i + 1)..3 {
            m = &m + &ComplexMatrix::outer(&antisymmetric_pair(3, i, j)).scale(eta / 3.0);
        }
    }
    DensityMatrix::new(m, vec![3, 3])
}

pub fn qutrit_isotropic(eta: f64) -> Result<DensityMatrix> {
    isotropic(3, eta)
}

/// Three-qubit GHZ state `(|000⟩ + |111⟩)/√2`.
///
/// This sign makes the state a `-1` eigenvector of `σxσyσy`, `σyσxσy`,
/// `σyσyσx` and a `+1` eigenvector of `σxσxσx`.
pub fn ghz() -> DensityMatrix {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[7] = C64::new(FRAC_1_SQRT_2, 0.0);
    DensityMatrix::from_pure(&v, vec![2, 2, 2]).expect("normalized")
}

/// Product of single-party states.
pub fn product(parts: &[DensityMatrix]) -> Option<DensityMatrix> {
    parts.iter().cloned().reduce(|acc, p| acc.tensor(&p))
}

/// Pure qubit state with Bloch vector `n`.
pub fn bloch_state(n: [f64; 3]) -> Result<DensityMatrix> {
    let m = ProjectiveMeasurement::bloch(n)?;
    DensityMatrix::from_pure(&m.vectors()[0], vec![2])
}

/// Complete set of mutually unbiased bases for `dim ∈ {2, 3}`.
///
/// For qubits these are the eigenbases of `σx, σy, σz`. For qutrits: the
/// computational basis plus the columns of three phase matrices built from
/// `ω = 2π/3`.
pub fn mub_family(dim: usize) -> Result<Vec<ProjectiveMeasurement>> {
    match dim {
        2 => Ok(vec![
            ProjectiveMeasurement::pauli_x(),
            ProjectiveMeasurement::pauli_y(),
            ProjectiveMeasurement::pauli_z(),
        ]),
        3 => {
            let w = 2.0 * PI / 3.0;
            let e = |k: i32| C64::from_polar(1.0 / 3f64.sqrt(), k as f64 * w);
            // each entry is the exponent of e^{iω}; rows of the phase matrix
            let tables: [[[i32; 3]; 3]; 3] = [
                [[0, -1, 1], [0, 1, -1], [0, 0, 0]],
                [[-1, 1, 0], [-1, 0, 1], [0, 0, 0]],
                [[1, 0, -1], [1, -1, 0], [0, 0, 0]],
            ];
            let mut bases = vec![ProjectiveMeasurement::computational(3)];
            for table in tables {
                let columns = (0..3).map(|col| (0..3).map(|row| e(table[row][col])).collect()).collect();
                bases.push(ProjectiveMeasurement::from_basis_unlabelled(columns)?);
            }
            Ok(bases)
        }
        other => Err(QuantumError::UnsupportedDimension(other)),
    }
}

/// Basis vector `|i⟩` of a `dim`-level system.
pub fn ket(dim: usize, i: usize) -> Vec<C64> {
    basis_vector(dim, i)
}
