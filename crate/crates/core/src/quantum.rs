//! Quantum states, projective measurements and Born-rule statistics.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError};

/// Default validation tolerance for states and measurements.
pub const VALIDATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("trace is {trace} (expected 1)")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min:e})")]
    NotPositive { min: f64 },

    #[error("party dimensions {party_dims:?} do not multiply to {dim}")]
    PartyDims { party_dims: Vec<usize>, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} parties, found {found}")]
    PartyCount { expected: usize, found: usize },

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("observable has degenerate eigenvalues (gap {gap:e})")]
    DegenerateObservable { gap: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid assemblage: {0}")]
    InvalidAssemblage(String),

    #[error("parameter {name} = {value} outside its allowed range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("direction vector has zero or non-unit norm ({norm})")]
    BadDirection { norm: f64 },
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Non-negative real vector with a declared total.
///
/// Normalized distributions have total 1; unnormalized rows such as the
/// joint-distribution row `q(y; x_i)` carry their own total.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    components: Vec<f64>,
    total: f64,
}

impl ProbabilityVector {
    /// Wraps `components`, declaring their sum as the total.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let total = components.iter().sum();
        Self::with_total(components, total, VALIDATE_TOL)
    }

    pub fn with_total(components: Vec<f64>, total: f64, tol: f64) -> Result<Self> {
        if let Some(bad) = components.iter().find(|c| !c.is_finite() || **c < -tol) {
            return Err(QuantumError::InvalidProbability(format!("component {bad}")));
        }
        let sum: f64 = components.iter().sum();
        if (sum - total).abs() > tol * total.abs().max(1.0) {
            return Err(QuantumError::InvalidProbability(format!(
                "components sum to {sum}, declared total {total}"
            )));
        }
        Ok(Self { components, total })
    }

    /// A normalized distribution (total 1 within `tol`).
    pub fn normalized(components: Vec<f64>, tol: f64) -> Result<Self> {
        Self::with_total(components, 1.0, tol)
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<f64> {
        self.components
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            components: self.components.iter().map(|c| c * factor).collect(),
            total: self.total * factor,
        }
    }
}

/// Multi-index distribution over outcome tuples, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    outcome_counts: Vec<usize>,
    values: Vec<f64>,
}

impl JointDistribution {
    pub fn new(outcome_counts: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let cells: usize = outcome_counts.iter().product();
        if cells != values.len() {
            return Err(QuantumError::DimensionMismatch {
                expected: cells,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < -VALIDATE_TOL) {
            return Err(QuantumError::InvalidProbability(format!("entry {bad}")));
        }
        Ok(Self {
            outcome_counts,
            values,
        })
    }

    pub fn outcome_counts(&self) -> &[usize] {
        &self.outcome_counts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.outcome_counts.len(), "index arity");
        index
            .iter()
            .zip(&self.outcome_counts)
            .fold(0, |acc, (&i, &n)| {
                assert!(i < n, "outcome index {i} out of range {n}");
                acc * n + i
            })
    }

    /// Probability of an outcome tuple (0-based indices).
    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.flat_index(index)]
    }

    /// Decodes a flat index into an outcome tuple.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.outcome_counts.len()];
        for (slot, &n) in idx.iter_mut().zip(&self.outcome_counts).rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    /// Distribution of a single party's outcomes.
    pub fn party_marginal(&self, party: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.outcome_counts[party]];
        for (flat, v) in self.values.iter().enumerate() {
            out[self.unflatten(flat)[party]] += v;
        }
        out
    }

    /// Bipartite row `P(x_i, ·)`, the unnormalized vector `q(y; x_i)`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        assert_eq!(self.outcome_counts.len(), 2, "row() needs a bipartite distribution");
        let n = self.outcome_counts[1];
        self.values[i * n..(i + 1) * n].to_vec()
    }

    /// Bipartite column `P(·, y_j)`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        assert_eq!(self.outcome_counts.len(), 2, "column() needs a bipartite distribution");
        let n = self.outcome_counts[1];
        (0..self.outcome_counts[0]).map(|i| self.values[i * n + j]).collect()
    }

    /// Swaps the two parties of a bipartite distribution.
    pub fn transposed(&self) -> Self {
        assert_eq!(self.outcome_counts.len(), 2);
        let (m, n) = (self.outcome_counts[0], self.outcome_counts[1]);
        let mut values = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                values[j * m + i] = self.values[i * n + j];
            }
        }
        Self {
            outcome_counts: vec![n, m],
            values,
        }
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        assert_eq!(self.outcome_counts, other.outcome_counts);
        Self {
            outcome_counts: self.outcome_counts.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect(),
        }
    }

    pub fn uniform(outcome_counts: Vec<usize>) -> Self {
        let cells: usize = outcome_counts.iter().product();
        Self {
            outcome_counts,
            values: vec![1.0 / cells as f64; cells],
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over a product of
/// party spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    party_dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, party_dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerance(matrix, party_dims, VALIDATE_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, party_dims: Vec<usize>, tol: f64) -> Result<Self> {
        let dim: usize = party_dims.iter().product();
        if dim != matrix.dim() || party_dims.contains(&0) {
            return Err(QuantumError::PartyDims {
                party_dims,
                dim: matrix.dim(),
            });
        }
        let eig = linalg::eigh(&matrix, tol)?;
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(QuantumError::Trace { trace });
        }
        if eig.min_eigenvalue() < -tol {
            return Err(QuantumError::NotPositive {
                min: eig.min_eigenvalue(),
            });
        }
        Ok(Self { matrix, party_dims })
    }

    /// `|ψ⟩⟨ψ|` for the normalized amplitude vector.
    pub fn from_pure(amplitudes: &[C64], party_dims: Vec<usize>) -> Result<Self> {
        let n = linalg::norm(amplitudes);
        if n == 0.0 {
            return Err(QuantumError::InvalidProbability("zero state vector".into()));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / n).collect();
        Self::new(ComplexMatrix::outer(&psi), party_dims)
    }

    pub fn maximally_mixed(party_dims: Vec<usize>) -> Self {
        let dim: usize = party_dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
            party_dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn party_count(&self) -> usize {
        self.party_dims.len()
    }

    /// `self ⊗ other`, with the party lists concatenated.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut party_dims = self.party_dims.clone();
        party_dims.extend_from_slice(&other.party_dims);
        Self {
            matrix: self.matrix.kron(&other.matrix),
            party_dims,
        }
    }

    /// Convex combination `w·self + (1-w)·other` of states on the same parties.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.party_dims != other.party_dims {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(QuantumError::ParameterOutOfRange { name: "weight", value: w });
        }
        Ok(Self {
            matrix: &self.matrix.scale(w) + &other.matrix.scale(1.0 - w),
            party_dims: self.party_dims.clone(),
        })
    }

    fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut d = vec![0; self.party_dims.len()];
        for (slot, &n) in d.iter_mut().zip(&self.party_dims).rev() {
            *slot = flat % n;
            flat /= n;
        }
        d
    }

    /// Partial trace keeping `keep` (in the given order).
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&p| p >= self.party_count()) {
            return Err(QuantumError::PartyCount {
                expected: self.party_count(),
                found: keep.len(),
            });
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&p| self.party_dims[p]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced: Vec<usize> = (0..self.party_count()).filter(|p| !keep.contains(p)).collect();
        let mut out = ComplexMatrix::zeros(kept_dim);
        let n = self.dim();
        let encode = |digits: &[usize]| keep.iter().zip(&kept_dims).fold(0, |acc, (&p, &d)| acc * d + digits[p]);
        for r in 0..n {
            let dr = self.digits(r);
            for c in 0..n {
                let dc = self.digits(c);
                if traced.iter().all(|&p| dr[p] == dc[p]) {
                    out[(encode(&dr), encode(&dc))] += self.matrix[(r, c)];
                }
            }
        }
        Ok(Self {
            matrix: out,
            party_dims: kept_dims,
        })
    }

    /// Exchanges the two parties of a bipartite state.
    pub fn swap_parties(&self) -> Result<Self> {
        self.require_bipartite()?;
        let (da, db) = (self.party_dims[0], self.party_dims[1]);
        let perm = |flat: usize| {
            let (a, b) = (flat / db, flat % db);
            b * da + a
        };
        let mut out = ComplexMatrix::zeros(self.dim());
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                out[(perm(r), perm(c))] = self.matrix[(r, c)];
            }
        }
        Ok(Self {
            matrix: out,
            party_dims: vec![db, da],
        })
    }

    pub(crate) fn require_bipartite(&self) -> Result<()> {
        if self.party_count() != 2 {
            return Err(QuantumError::PartyCount {
                expected: 2,
                found: self.party_count(),
            });
        }
        Ok(())
    }

    /// Smallest eigenvalue, for diagnostics.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigh(&self.matrix, 1e-6)
            .map(|e| e.min_eigenvalue())
            .unwrap_or(f64::NAN)
    }

    /// `⟨v|ρ|v⟩` for a vector on the full space.
    pub fn expectation_vector(&self, v: &[C64]) -> f64 {
        let rv = self.matrix.matvec(v);
        linalg::inner(v, &rv).re
    }
}

/// Non-degenerate projective measurement: one rank-1 projector per outcome.
///
/// Outcomes are ordered by descending label, so for qubit observables outcome
/// 0 carries label `+1` and outcome 1 carries label `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    vectors: Vec<Vec<C64>>,
    projectors: Vec<ComplexMatrix>,
    labels: Vec<f64>,
}

impl ProjectiveMeasurement {
    /// From an orthonormal basis and one label per basis vector.
    pub fn from_basis(vectors: Vec<Vec<C64>>, labels: Vec<f64>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(QuantumError::InvalidMeasurement("empty basis".into()));
        }
        if labels.len() != dim {
            return Err(QuantumError::InvalidMeasurement(format!(
                "{} labels for {} outcomes",
                labels.len(),
                dim
            )));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate().skip(i) {
                let expect = if i == j { 1.0 } else { 0.0 };
                let got = linalg::inner(a, b);
                if (got - C64::new(expect, 0.0)).norm() > 1e-10 {
                    return Err(QuantumError::InvalidMeasurement(format!(
                        "basis vectors {i} and {j} have inner product {got}"
                    )));
                }
            }
        }
        let projectors = vectors.iter().map(|v| ComplexMatrix::outer(v)).collect();
        Ok(Self {
            vectors,
            projectors,
            labels,
        })
    }

    /// From a basis labelled `0, -1, -2, …` (labels only order outcomes).
    pub fn from_basis_unlabelled(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|i| -(i as f64)).collect();
        Self::from_basis(vectors, labels)
    }

    /// From explicit rank-1 projectors, checking Hermiticity, idempotence,
    /// mutual orthogonality and completeness.
    pub fn from_projectors(projectors: Vec<ComplexMatrix>, labels: Vec<f64>) -> Result<Self> {
        let n = projectors.len();
        if n == 0 || labels.len() != n {
            return Err(QuantumError::InvalidMeasurement(format!(
                "{} labels for {} projectors",
                labels.len(),
                n
            )));
        }
        let tol = 1e-10;
        let mut sum = ComplexMatrix::zeros(n);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != n {
                return Err(QuantumError::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            if p.hermiticity_error().0 > tol {
                return Err(QuantumError::InvalidMeasurement(format!("projector {i} not Hermitian")));
            }
            for (j, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let expect = if i == j { p.clone() } else { ComplexMatrix::zeros(n) };
                if prod.max_abs_diff(&expect) > tol {
                    return Err(QuantumError::InvalidMeasurement(format!(
                        "projectors {i},{j} violate Π_iΠ_j = δ_ij Π_i"
                    )));
                }
            }
            if (p.trace().re - 1.0).abs() > tol {
                return Err(QuantumError::InvalidMeasurement(format!("projector {i} is not rank 1")));
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(n)) > tol {
            return Err(QuantumError::InvalidMeasurement("projectors do not sum to identity".into()));
        }
        // a rank-1 projector's largest column is proportional to its range vector
        let vectors = projectors
            .iter()
            .map(|p| {
                let col = (0..n)
                    .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re))
                    .expect("non-empty");
                let v: Vec<C64> = (0..n).map(|r| p[(r, col)]).collect();
                let len = linalg::norm(&v);
                v.into_iter().map(|z| z / len).collect()
            })
            .collect();
        Ok(Self {
            vectors,
            projectors,
            labels,
        })
    }

    /// Diagonalizes a Hermitian observable; eigenvalues become labels.
    pub fn from_observable(observable: &ComplexMatrix) -> Result<Self> {
        let eig = linalg::eigh(observable, VALIDATE_TOL)?;
        let gap = eig
            .values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        if gap < 1e-9 {
            return Err(QuantumError::DegenerateObservable { gap });
        }
        Self::from_basis(eig.vectors, eig.values)
    }

    /// Projective measurement along a Bloch direction, labels `(+1, -1)`.
    pub fn bloch(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > VALIDATE_TOL {
            return Err(QuantumError::BadDirection { norm });
        }
        let [x, y, z] = direction;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = C64::from_polar(1.0, phi);
        let plus = vec![C64::new(c, 0.0), e * s];
        let minus = vec![C64::new(-s, 0.0), e * c];
        Self::from_basis(vec![plus, minus], vec![1.0, -1.0])
    }

    pub fn pauli_x() -> Self {
        Self::bloch([1.0, 0.0, 0.0]).expect("unit vector")
    }

    pub fn pauli_y() -> Self {
        Self::bloch([0.0, 1.0, 0.0]).expect("unit vector")
    }

    pub fn pauli_z() -> Self {
        Self::bloch([0.0, 0.0, 1.0]).expect("unit vector")
    }

    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| (0..dim).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        Self::from_basis_unlabelled(vectors).expect("standard basis")
    }

    /// Entry-wise complex-conjugate basis, same labels.
    pub fn conjugate(&self) -> Self {
        let vectors: Vec<Vec<C64>> = self.vectors.iter().map(|v| v.iter().map(|z| z.conj()).collect()).collect();
        Self {
            projectors: vectors.iter().map(|v| ComplexMatrix::outer(v)).collect(),
            vectors,
            labels: self.labels.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.vectors.len()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// `Σ_i label_i Π_i`.
    pub fn observable(&self) -> ComplexMatrix {
        self.projectors
            .iter()
            .zip(&self.labels)
            .fold(ComplexMatrix::zeros(self.dim()), |acc, (p, &l)| &acc + &p.scale(l))
    }

    /// Bloch vector of outcome `i`'s projector (qubits only).
    pub fn bloch_vector(&self, i: usize) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let p = &self.projectors[i];
        Some([2.0 * p[(1, 0)].re, 2.0 * p[(1, 0)].im, (p[(0, 0)] - p[(1, 1)]).re])
    }
}

/// Unnormalized conditional states of one party given the other's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    members: Vec<ComplexMatrix>,
}

impl Assemblage {
    pub fn new(members: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let mut total = 0.0;
        for (i, m) in members.iter().enumerate() {
            let eig = linalg::eigh(m, tol)?;
            if eig.min_eigenvalue() < -tol {
                return Err(QuantumError::InvalidAssemblage(format!(
                    "member {i} has eigenvalue {}",
                    eig.min_eigenvalue()
                )));
            }
            total += m.trace().re;
        }
        if (total - 1.0).abs() > tol {
            return Err(QuantumError::InvalidAssemblage(format!("traces sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn traces(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.trace().re).collect()
    }

    /// `Σ_i σ_i`, which equals the steered party's reduced state.
    pub fn sum(&self) -> ComplexMatrix {
        let dim = self.members[0].dim();
        self.members
            .iter()
            .fold(ComplexMatrix::zeros(dim), |acc, m| &acc + m)
    }
}

/// `p_i = Tr(Π_i ρ)` for a measurement on the whole state.
pub fn born_probabilities(state: &DensityMatrix, meas: &ProjectiveMeasurement) -> Result<ProbabilityVector> {
    if state.dim() != meas.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: state.dim(),
            found: meas.dim(),
        });
    }
    let probs: Vec<f64> = meas
        .vectors()
        .iter()
        .map(|v| state.expectation_vector(v).max(0.0))
        .collect();
    ProbabilityVector::normalized(probs, VALIDATE_TOL)
}

fn kron_vectors(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `P_{ij…} = Tr[(Π_i ⊗ Π_j ⊗ …) ρ]`, one measurement per party.
pub fn joint_distribution(state: &DensityMatrix, meas_per_party: &[&ProjectiveMeasurement]) -> Result<JointDistribution> {
    if meas_per_party.len() != state.party_count() {
        return Err(QuantumError::PartyCount {
            expected: state.party_count(),
            found: meas_per_party.len(),
        });
    }
    for (m, &d) in meas_per_party.iter().zip(state.party_dims()) {
        if m.dim() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
    }
    let counts: Vec<usize> = meas_per_party.iter().map(|m| m.outcome_count()).collect();
    let cells: usize = counts.iter().product();
    let mut values = Vec::with_capacity(cells);
    let mut idx = vec![0usize; counts.len()];
    for _ in 0..cells {
        let v = meas_per_party
            .iter()
            .zip(&idx)
            .map(|(m, &i)| m.vectors()[i].clone())
            .reduce(|acc, v| kron_vectors(&acc, &v))
            .expect("at least one party");
        values.push(state.expectation_vector(&v).max(0.0));
        for (slot, &n) in idx.iter_mut().zip(&counts).rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    JointDistribution::new(counts, values)
}

/// Conditional states `σ_i = Tr_A[(Π_i ⊗ 1) ρ]` of party B.
pub fn assemblage(state: &DensityMatrix, meas_on_a: &ProjectiveMeasurement) -> Result<Assemblage> {
    state.require_bipartite()?;
    let (da, db) = (state.party_dims()[0], state.party_dims()[1]);
    if meas_on_a.dim() != da {
        return Err(QuantumError::DimensionMismatch {
            expected: da,
            found: meas_on_a.dim(),
        });
    }
    let rho = state.matrix();
    let members = meas_on_a
        .projectors()
        .iter()
        .map(|p| {
            ComplexMatrix::from_fn(db, |b, b2| {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..da {
                    for a2 in 0..da {
                        acc += p[(a2, a)] * rho[(a * db + b, a2 * db + b2)];
                    }
                }
                acc
            })
        })
        .collect();
    Assemblage::new(members, VALIDATE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eigenstate_gives_deterministic_outcome() {
        let zero = DensityMatrix::from_pure(&[c(1.0), c(0.0)], vec![2]).unwrap();
        let p = born_probabilities(&zero, &ProjectiveMeasurement::pauli_z()).unwrap();
        assert!((p.components()[0] - 1.0).abs() < 1e-12);
        assert!(p.components()[1].abs() < 1e-12);
        let p = born_probabilities(&zero, &ProjectiveMeasurement::pauli_x()).unwrap();
        assert!((p.components()[0] - 0.5).abs() < 1e-12);
        assert!((p.components()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_uniform_for_any_measurement() {
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        let m = ProjectiveMeasurement::bloch([0.6, 0.0, 0.8]).unwrap();
        let p = born_probabilities(&mixed, &m).unwrap();
        assert!(p.components().iter().all(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn singlet_is_perfectly_anticorrelated_in_z() {
        let s = families::singlet();
        let z = ProjectiveMeasurement::pauli_z();
        let p = joint_distribution(&s, &[&z, &z]).unwrap();
        let expect = [0.0, 0.5, 0.5, 0.0];
        for (a, b) in p.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_joint_factorizes() {
        let a = DensityMatrix::from_pure(&[c(0.6), C64::new(0.0, 0.8)], vec![2]).unwrap();
        let b = DensityMatrix::from_pure(&[c(0.8), c(0.6)], vec![2]).unwrap();
        let ab = a.tensor(&b);
        let (mx, mz) = (ProjectiveMeasurement::pauli_y(), ProjectiveMeasurement::pauli_x());
        let joint = joint_distribution(&ab, &[&mx, &mz]).unwrap();
        let pa = born_probabilities(&a, &mx).unwrap();
        let pb = born_probabilities(&b, &mz).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((joint.get(&[i, j]) - pa.components()[i] * pb.components()[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn werner_rows_along_common_axis() {
        let eta = 0.37;
        let w = families::qubit_werner(eta).unwrap();
        let m = ProjectiveMeasurement::bloch([0.0, 0.6, 0.8]).unwrap();
        let joint = joint_distribution(&w, &[&m, &m]).unwrap();
        for i in 0..2 {
            let mut row = joint.row(i);
            row.sort_by(|a, b| b.total_cmp(a));
            assert!((row[0] - (1.0 + eta) / 4.0).abs() < 1e-12);
            assert!((row[1] - (1.0 - eta) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singlet_assemblage_matches_partial_trace() {
        let s = families::singlet();
        let asm = assemblage(&s, &ProjectiveMeasurement::pauli_z()).unwrap();
        // outcome 0 (|0⟩ on A) leaves B in |1⟩ with weight 1/2, and vice versa
        let half_one = ComplexMatrix::diagonal(&[0.0, 0.5]);
        let half_zero = ComplexMatrix::diagonal(&[0.5, 0.0]);
        assert!(asm.members()[0].max_abs_diff(&half_one) < 1e-12);
        assert!(asm.members()[1].max_abs_diff(&half_zero) < 1e-12);
        // oracle: the explicit partial trace with a projector inserted
        let p0 = ProjectiveMeasurement::pauli_z().projectors()[0].clone();
        let lifted = &p0.kron(&ComplexMatrix::identity(2)) * s.matrix();
        let lifted = DensityMatrix {
            matrix: lifted,
            party_dims: vec![2, 2],
        };
        let oracle = lifted.reduced(&[1]).unwrap();
        assert!(oracle.matrix().max_abs_diff(&asm.members()[0]) < 1e-12);
    }

    #[test]
    fn product_assemblage_is_weighted_copy_of_b() {
        let a = DensityMatrix::from_pure(&[c(0.6), c(0.8)], vec![2]).unwrap();
        let b = DensityMatrix::from_pure(&[c(1.0), C64::new(0.0, 1.0)], vec![2]).unwrap();
        let m = ProjectiveMeasurement::pauli_x();
        let asm = assemblage(&a.tensor(&b), &m).unwrap();
        let p = born_probabilities(&a, &m).unwrap();
        for (member, pi) in asm.members().iter().zip(p.components()) {
            assert!(member.max_abs_diff(&b.matrix().scale(*pi)) < 1e-12);
        }
        assert!(asm.sum().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn assemblage_rejects_tripartite_state() {
        let ghz = families::ghz();
        assert!(matches!(
            assemblage(&ghz, &ProjectiveMeasurement::pauli_z()),
            Err(QuantumError::PartyCount { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let s = families::singlet();
        let z = ProjectiveMeasurement::pauli_z();
        assert!(born_probabilities(&s, &z).is_err());
        assert!(joint_distribution(&s, &[&z]).is_err());
        let q = ProjectiveMeasurement::computational(3);
        assert!(joint_distribution(&s, &[&z, &q]).is_err());
    }

    #[test]
    fn observable_round_trip_and_degeneracy() {
        let x = ProjectiveMeasurement::pauli_x();
        let again = ProjectiveMeasurement::from_observable(&x.observable()).unwrap();
        assert_eq!(again.labels(), &[1.0, -1.0]);
        assert!(again.projectors()[0].max_abs_diff(&x.projectors()[0]) < 1e-12);
        let degenerate = ComplexMatrix::diagonal(&[1.0, 1.0, -1.0]);
        assert!(matches!(
            ProjectiveMeasurement::from_observable(&degenerate),
            Err(QuantumError::DegenerateObservable { .. })
        ));
    }

    #[test]
    fn projector_list_validation() {
        let z = ProjectiveMeasurement::pauli_z();
        let ok = ProjectiveMeasurement::from_projectors(z.projectors().to_vec(), vec![1.0, -1.0]).unwrap();
        assert_eq!(ok.vectors().len(), 2);
        let bad = vec![z.projectors()[0].clone(), z.projectors()[0].clone()];
        assert!(ProjectiveMeasurement::from_projectors(bad, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn rejects_invalid_density_matrices() {
        let not_unit = ComplexMatrix::diagonal(&[0.7, 0.7]);
        assert!(matches!(DensityMatrix::new(not_unit, vec![2]), Err(QuantumError::Trace { .. })));
        let negative = ComplexMatrix::diagonal(&[1.2, -0.2]);
        assert!(matches!(DensityMatrix::new(negative, vec![2]), Err(QuantumError::NotPositive { .. })));
        let dims = ComplexMatrix::identity(4).scale(0.25);
        assert!(matches!(DensityMatrix::new(dims, vec![3]), Err(QuantumError::PartyDims { .. })));
    }

    #[test]
    fn bloch_overlap_is_cos_squared_half_angle() {
        let theta: f64 = 1.1;
        let a = ProjectiveMeasurement::bloch([0.0, 0.0, 1.0]).unwrap();
        let b = ProjectiveMeasurement::bloch([theta.sin(), 0.0, theta.cos()]).unwrap();
        let overlap = linalg::inner(&a.vectors()[0], &b.vectors()[0]).norm_sqr();
        // oracle: Tr(Π_a Π_b) = (1 + n_a·n_b)/2 from the 2x2 Pauli algebra
        let oracle = a.projectors()[0].trace_product(&b.projectors()[0]).re;
        assert!((overlap - oracle).abs() < 1e-12);
        assert!((overlap - (theta / 2.0).cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn bloch_rejects_zero_vector() {
        assert!(matches!(
            ProjectiveMeasurement::bloch([0.0; 3]),
            Err(QuantumError::BadDirection { .. })
        ));
    }

    #[test]
    fn swap_parties_exchanges_marginals() {
        let a = DensityMatrix::from_pure(&[c(0.6), c(0.8)], vec![2]).unwrap();
        let b = DensityMatrix::maximally_mixed(vec![3]);
        let swapped = a.tensor(&b).swap_parties().unwrap();
        assert_eq!(swapped.party_dims(), &[3, 2]);
        assert!(swapped.matrix().max_abs_diff(b.tensor(&a).matrix()) < 1e-14);
    }
}
