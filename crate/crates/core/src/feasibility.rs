//! Bell locality and the GHZ argument as linear feasibility over tensors.
//!
//! The variables are the cells of a magic-square tensor, constrained to be
//! non-negative. Observed statistics become equality rows built from the
//! tensor's own marginal and parity maps, so the hidden-variable mixture is
//! never enumerated.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

use crate::families;
use crate::quantum::{joint_distribution, DensityMatrix, JointDistribution, ProjectiveMeasurement, QuantumError};
use crate::simplex::{
    self, FeasibilityOutcome, LinearFeasibilityProblem, LpError, OptimizeOutcome, Sense, FEASIBILITY_TOL,
};
use crate::tensor::{MagicSquareTensor, TensorError, TensorShape};

#[derive(Debug, Error)]
pub enum FeasibilityError {
    #[error(transparent)]
    Tensor(#[from] TensorError),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error(transparent)]
    Quantum(#[from] QuantumError),

    #[error("invalid joint distributions: {0}")]
    InvalidJoints(String),

    #[error("joints signal: party {party} setting {setting} marginal varies by {deviation:.3e}")]
    Signalling {
        party: usize,
        setting: usize,
        deviation: f64,
    },

    #[error("solver witness fails re-validation (residual {residual:.3e})")]
    WitnessRejected { residual: f64 },

    #[error("solver certificate fails re-validation (max yᵀA = {worst:.3e}, yᵀb = {gap:.3e})")]
    CertificateRejected { worst: f64, gap: f64 },

    #[error("feasibility is not monotone in visibility near {visibility}")]
    NonMonotone { visibility: f64 },

    #[error("linear program unexpectedly {0}")]
    Unexpected(&'static str),
}

pub type Result<T> = std::result::Result<T, FeasibilityError>;

/// Joint distributions `P(X_x, Y_y)` for every pair of settings.
#[derive(Debug, Clone, PartialEq)]
pub struct BellJoints {
    joints: Vec<Vec<JointDistribution>>,
}

impl BellJoints {
    /// `joints[x][y]` is the distribution for A-setting `x`, B-setting `y`.
    /// Checks shapes, normalization and no-signalling.
    pub fn new(joints: Vec<Vec<JointDistribution>>, tol: f64) -> Result<Self> {
        if joints.is_empty() || joints[0].is_empty() {
            return Err(FeasibilityError::InvalidJoints("no settings".into()));
        }
        let settings_b = joints[0].len();
        if joints.iter().any(|row| row.len() != settings_b) {
            return Err(FeasibilityError::InvalidJoints("ragged setting table".into()));
        }
        let out_a: Vec<usize> = joints.iter().map(|row| row[0].outcome_counts()[0]).collect();
        let out_b: Vec<usize> = joints[0].iter().map(|p| p.outcome_counts().get(1).copied().unwrap_or(0)).collect();
        for (x, row) in joints.iter().enumerate() {
            for (y, p) in row.iter().enumerate() {
                if p.outcome_counts() != [out_a[x], out_b[y]] {
                    return Err(FeasibilityError::InvalidJoints(format!(
                        "P(X{x}, Y{y}) has outcome counts {:?}, expected [{}, {}]",
                        p.outcome_counts(),
                        out_a[x],
                        out_b[y]
                    )));
                }
                if (p.total() - 1.0).abs() > tol {
                    return Err(FeasibilityError::InvalidJoints(format!(
                        "P(X{x}, Y{y}) sums to {}",
                        p.total()
                    )));
                }
            }
        }
        let deviation = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        for (x, row) in joints.iter().enumerate() {
            let reference = row[0].party_marginal(0);
            for p in &row[1..] {
                let d = deviation(&reference, &p.party_marginal(0));
                if d > tol {
                    return Err(FeasibilityError::Signalling {
                        party: 0,
                        setting: x,
                        deviation: d,
                    });
                }
            }
        }
        for y in 0..settings_b {
            let reference = joints[0][y].party_marginal(1);
            for row in &joints[1..] {
                let d = deviation(&reference, &row[y].party_marginal(1));
                if d > tol {
                    return Err(FeasibilityError::Signalling {
                        party: 1,
                        setting: y,
                        deviation: d,
                    });
                }
            }
        }
        Ok(Self { joints })
    }

    /// Born-rule joints of a bipartite state.
    pub fn from_state(
        state: &DensityMatrix,
        meas_a: &[ProjectiveMeasurement],
        meas_b: &[ProjectiveMeasurement],
    ) -> Result<Self> {
        let joints = meas_a
            .iter()
            .map(|a| {
                meas_b
                    .iter()
                    .map(|b| joint_distribution(state, &[a, b]))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(joints, 1e-9)
    }

    /// Double partial sums of a two-party tensor.
    pub fn from_tensor(tensor: &MagicSquareTensor) -> Result<Self> {
        let shape = tensor.shape();
        if shape.party_count() != 2 {
            return Err(FeasibilityError::InvalidJoints("tensor is not bipartite".into()));
        }
        let joints = (0..shape.measurement_count(0))
            .map(|x| {
                (0..shape.measurement_count(1))
                    .map(|y| tensor.marginal(&[(0, x), (1, y)]))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(joints, 1e-8)
    }

    pub fn get(&self, x: usize, y: usize) -> &JointDistribution {
        &self.joints[x][y]
    }

    pub fn settings(&self) -> (usize, usize) {
        (self.joints.len(), self.joints[0].len())
    }

    /// Shape of the tensor whose marginals these joints are.
    pub fn tensor_shape(&self) -> TensorShape {
        let a = self.joints.iter().map(|row| row[0].outcome_counts()[0]).collect();
        let b = self.joints[0].iter().map(|p| p.outcome_counts()[1]).collect();
        TensorShape::new(vec![a, b]).expect("non-empty settings")
    }

    /// `v·P + (1-v)·uniform` for every joint.
    pub fn with_visibility(&self, v: f64) -> Self {
        Self {
            joints: self
                .joints
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| p.mix(&JointDistribution::uniform(p.outcome_counts().to_vec()), v))
                        .collect()
                })
                .collect(),
        }
    }

    /// `E = P₁₁ - P₁₂ - P₂₁ + P₂₂` for dichotomic settings.
    pub fn correlation(&self, x: usize, y: usize) -> Result<f64> {
        let p = &self.joints[x][y];
        if p.outcome_counts() != [2, 2] {
            return Err(FeasibilityError::InvalidJoints(format!("P(X{x}, Y{y}) is not dichotomic")));
        }
        Ok(p.get(&[0, 0]) - p.get(&[0, 1]) - p.get(&[1, 0]) + p.get(&[1, 1]))
    }

    pub fn chsh_value(&self) -> Result<f64> {
        if self.settings() != (2, 2) {
            return Err(FeasibilityError::InvalidJoints("CHSH needs two settings per party".into()));
        }
        Ok(self.correlation(0, 0)? - self.correlation(0, 1)? + self.correlation(1, 0)? + self.correlation(1, 1)?)
    }

    /// `Σ P(x_i, y_j) = m` rows over the tensor cells, plus normalization.
    pub fn problem(&self) -> Result<LinearFeasibilityProblem> {
        let shape = self.tensor_shape();
        let cells = shape.cell_count();
        let mut problem = LinearFeasibilityProblem::new(vec![vec![1.0; cells]], vec![1.0], cells)?;
        for (x, row) in self.joints.iter().enumerate() {
            for (y, p) in row.iter().enumerate() {
                let (counts, map) = shape.marginal_map(&[(0, x), (1, y)])?;
                for target in 0..counts.iter().product() {
                    let coeffs = map.iter().map(|&t| if t == target { 1.0 } else { 0.0 }).collect();
                    problem.push(coeffs, p.values()[target])?;
                }
            }
        }
        Ok(problem)
    }
}

/// Outcome of a locality decision, with re-validated evidence.
#[derive(Debug, Clone)]
pub enum LocalityVerdict {
    /// A tensor reproducing every joint.
    Local { tensor: MagicSquareTensor, residual: f64 },
    /// Farkas certificate `y` with `yᵀA ≤ 0`, `yᵀb > 0`.
    Nonlocal { certificate: Vec<f64>, gap: f64 },
}

impl LocalityVerdict {
    pub fn is_local(&self) -> bool {
        matches!(self, Self::Local { .. })
    }
}

#[derive(Debug, Clone)]
pub struct BellDecision {
    pub problem: LinearFeasibilityProblem,
    pub verdict: LocalityVerdict,
}

/// Solves and independently re-checks whatever the solver returned.
pub fn checked_solve(problem: &LinearFeasibilityProblem) -> Result<FeasibilityOutcome> {
    let outcome = simplex::solve_feasibility(problem)?;
    match &outcome {
        FeasibilityOutcome::Feasible { point } => {
            if !problem.verify_point(point, FEASIBILITY_TOL) {
                return Err(FeasibilityError::WitnessRejected {
                    residual: problem.point_residual(point),
                });
            }
        }
        FeasibilityOutcome::Infeasible { certificate } => {
            if !problem.verify_certificate(certificate, FEASIBILITY_TOL) {
                let (worst, gap) = problem.certificate_margins(certificate);
                return Err(FeasibilityError::CertificateRejected { worst, gap });
            }
        }
    }
    Ok(outcome)
}

/// Does a non-negative tensor with these double partial sums exist?
pub fn bell_locality_decide(joints: &BellJoints) -> Result<BellDecision> {
    let problem = joints.problem()?;
    let verdict = match checked_solve(&problem)? {
        FeasibilityOutcome::Feasible { point } => {
            let residual = problem.point_residual(&point);
            let tensor = MagicSquareTensor::with_tolerance(joints.tensor_shape(), point, FEASIBILITY_TOL)?;
            LocalityVerdict::Local { tensor, residual }
        }
        FeasibilityOutcome::Infeasible { certificate } => {
            let (_, gap) = problem.certificate_margins(&certificate);
            LocalityVerdict::Nonlocal { certificate, gap }
        }
    };
    Ok(BellDecision { problem, verdict })
}

/// Settings maximizing CHSH on the singlet: A ∈ {σz, σx} and B along
/// `-(z + x)/√2`, `(z - x)/√2`. The singlet has `E(a, b) = -a·b`, so these
/// give `S = +2√2`.
pub fn chsh_optimal_settings() -> (Vec<ProjectiveMeasurement>, Vec<ProjectiveMeasurement>) {
    let a = vec![ProjectiveMeasurement::pauli_z(), ProjectiveMeasurement::pauli_x()];
    let s = FRAC_1_SQRT_2;
    let b = vec![
        ProjectiveMeasurement::bloch([-s, 0.0, -s]).expect("unit vector"),
        ProjectiveMeasurement::bloch([-s, 0.0, s]).expect("unit vector"),
    ];
    (a, b)
}

/// Singlet statistics at the CHSH-optimal settings.
pub fn singlet_chsh_joints() -> BellJoints {
    let (a, b) = chsh_optimal_settings();
    BellJoints::from_state(&families::singlet(), &a, &b).expect("valid qubit settings")
}

/// Largest visibility at which the noisy joints still admit a tensor,
/// by bisection to `tol` after a coarse monotonicity scan.
pub fn visibility_threshold(joints: &BellJoints, tol: f64) -> Result<f64> {
    let local = |v: f64| -> Result<bool> { Ok(bell_locality_decide(&joints.with_visibility(v))?.verdict.is_local()) };
    let grid = 20;
    let mut seen_nonlocal = false;
    for step in 0..=grid {
        let v = step as f64 / grid as f64;
        let is_local = local(v)?;
        if is_local && seen_nonlocal {
            return Err(FeasibilityError::NonMonotone { visibility: v });
        }
        seen_nonlocal |= !is_local;
    }
    if local(1.0)? {
        return Ok(1.0);
    }
    if !local(0.0)? {
        return Err(FeasibilityError::NonMonotone { visibility: 0.0 });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if local(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn chsh_problem() -> Result<(LinearFeasibilityProblem, Vec<f64>)> {
    let shape = TensorShape::uniform(2, 2, 2);
    let cells = shape.cell_count();
    let problem = LinearFeasibilityProblem::new(vec![vec![1.0; cells]], vec![1.0], cells)?;
    Ok((problem, shape.chsh_coefficients()?))
}

fn optimal_value(outcome: OptimizeOutcome) -> Result<f64> {
    match outcome {
        OptimizeOutcome::Optimal { value, .. } => Ok(value),
        OptimizeOutcome::Infeasible { .. } => Err(FeasibilityError::Unexpected("infeasible")),
        OptimizeOutcome::Unbounded => Err(FeasibilityError::Unexpected("unbounded")),
    }
}

/// Extreme CHSH value over all valid 2×2×2 tensors.
pub fn chsh_max_over_tensors(sense: Sense) -> Result<f64> {
    let (problem, c) = chsh_problem()?;
    optimal_value(simplex::optimize(&problem, &c, sense)?)
}

/// Measurement patterns `XYY, YXY, YYX, XXX` with X = setting 0, Y = setting 1.
pub const GHZ_PATTERNS: [[usize; 3]; 4] = [[0, 1, 1], [1, 0, 1], [1, 1, 0], [0, 0, 0]];

pub fn ghz_shape() -> TensorShape {
    TensorShape::uniform(3, 2, 2)
}

/// Normalized tensor with prescribed parity expectations.
pub fn parity_problem(constraints: &[([usize; 3], f64)]) -> Result<LinearFeasibilityProblem> {
    let shape = ghz_shape();
    let cells = shape.cell_count();
    let mut problem = LinearFeasibilityProblem::new(vec![vec![1.0; cells]], vec![1.0], cells)?;
    for (pattern, value) in constraints {
        problem.push(shape.parity_coefficients(pattern)?, *value)?;
    }
    Ok(problem)
}

#[derive(Debug, Clone)]
pub struct GhzReport {
    /// `⟨XYY⟩ = ⟨YXY⟩ = ⟨YYX⟩ = -1`, `⟨XXX⟩ = +1`.
    pub full: FeasibilityOutcome,
    pub full_problem: LinearFeasibilityProblem,
    /// The first three constraints only.
    pub relaxed: FeasibilityOutcome,
    /// `(min, max)` of `⟨XXX⟩` over the relaxed system.
    pub forced_xxx: (f64, f64),
    /// All four expectations `+1`.
    pub all_plus: FeasibilityOutcome,
}

pub fn ghz_contradiction_check() -> Result<GhzReport> {
    let quantum: Vec<([usize; 3], f64)> = GHZ_PATTERNS.iter().zip([-1.0, -1.0, -1.0, 1.0]).map(|(p, v)| (*p, v)).collect();
    let full_problem = parity_problem(&quantum)?;
    let full = checked_solve(&full_problem)?;
    let relaxed_problem = parity_problem(&quantum[..3])?;
    let relaxed = checked_solve(&relaxed_problem)?;
    let xxx = ghz_shape().parity_coefficients(&GHZ_PATTERNS[3])?;
    let min = optimal_value(simplex::optimize(&relaxed_problem, &xxx, Sense::Minimize)?)?;
    let max = optimal_value(simplex::optimize(&relaxed_problem, &xxx, Sense::Maximize)?)?;
    let plus: Vec<([usize; 3], f64)> = GHZ_PATTERNS.iter().map(|p| (*p, 1.0)).collect();
    let all_plus = checked_solve(&parity_problem(&plus)?)?;
    Ok(GhzReport {
        full,
        full_problem,
        relaxed,
        forced_xxx: (min, max),
        all_plus,
    })
}

/// `⟨XYY⟩, ⟨YXY⟩, ⟨YYX⟩, ⟨XXX⟩` of the GHZ state from Born statistics.
pub fn ghz_quantum_expectations() -> Result<[f64; 4]> {
    let state = families::ghz();
    let settings = [ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()];
    let mut out = [0.0; 4];
    for (o, pattern) in out.iter_mut().zip(GHZ_PATTERNS) {
        let meas: Vec<&ProjectiveMeasurement> = pattern.iter().map(|&s| &settings[s]).collect();
        let p = joint_distribution(&state, &meas)?;
        *o = p
            .values()
            .iter()
            .enumerate()
            .map(|(flat, v)| {
                let flips: usize = p.unflatten(flat).iter().sum();
                if flips.is_multiple_of(2) {
                    *v
                } else {
                    -v
                }
            })
            .sum();
    }
    Ok(out)
}

/// Evaluates a Farkas certificate of a Bell problem as a linear functional
/// on joints: `Σ y_r b_r`. Positive values witness non-locality.
pub fn certificate_value(certificate: &[f64], joints: &BellJoints) -> Result<f64> {
    let problem = joints.problem()?;
    if certificate.len() != problem.constraint_count() {
        return Err(FeasibilityError::InvalidJoints("certificate length differs from problem".into()));
    }
    Ok(certificate.iter().zip(problem.rhs()).map(|(y, b)| y * b).sum())
}

/// Serializable summary of a solver outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub status: String,
    pub vector: Vec<f64>,
}

impl From<&FeasibilityOutcome> for OutcomeRecord {
    fn from(o: &FeasibilityOutcome) -> Self {
        match o {
            FeasibilityOutcome::Feasible { point } => Self {
                status: "feasible".into(),
                vector: point.clone(),
            },
            FeasibilityOutcome::Infeasible { certificate } => Self {
                status: "infeasible".into(),
                vector: certificate.clone(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{build_from_lhv, LhvModel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singlet_optimal_joints_give_tsirelson_value() {
        let joints = singlet_chsh_joints();
        let s = joints.chsh_value().unwrap();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-9, "{s}");
        let d = bell_locality_decide(&joints).unwrap();
        assert!(!d.verdict.is_local());
    }

    #[test]
    fn product_state_is_local() {
        let rho = families::product(&[
            families::bloch_state([0.6, 0.0, 0.8]).unwrap(),
            families::bloch_state([0.0, 1.0, 0.0]).unwrap(),
        ])
        .unwrap();
        let (a, b) = chsh_optimal_settings();
        let joints = BellJoints::from_state(&rho, &a, &b).unwrap();
        assert!(bell_locality_decide(&joints).unwrap().verdict.is_local());
    }

    #[test]
    fn deterministic_model_round_trip() {
        let shape = TensorShape::uniform(2, 2, 2);
        let t = build_from_lhv(&LhvModel::deterministic(&shape, &[vec![0, 0], vec![0, 0]]).unwrap());
        let joints = BellJoints::from_tensor(&t).unwrap();
        assert!((joints.chsh_value().unwrap() - 2.0).abs() < 1e-15);
        let LocalityVerdict::Local { tensor, .. } = bell_locality_decide(&joints).unwrap().verdict else {
            panic!("deterministic joints must be local");
        };
        let back = BellJoints::from_tensor(&tensor).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for (u, v) in back.get(x, y).values().iter().zip(joints.get(x, y).values()) {
                    assert!((u - v).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn random_model_round_trip_with_three_outcomes() {
        let shape = TensorShape::uniform(2, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = build_from_lhv(&LhvModel::random(&shape, 5, &mut rng));
        let joints = BellJoints::from_tensor(&t).unwrap();
        assert!(bell_locality_decide(&joints).unwrap().verdict.is_local());
    }

    #[test]
    fn signalling_joints_are_rejected() {
        let p = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let q = JointDistribution::new(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let err = BellJoints::new(vec![vec![p.clone(), q], vec![p.clone(), p]], 1e-9).unwrap_err();
        assert!(matches!(err, FeasibilityError::Signalling { party: 0, .. }));
    }

    #[test]
    fn chsh_extremes_over_tensors() {
        assert!((chsh_max_over_tensors(Sense::Maximize).unwrap() - 2.0).abs() < 1e-8);
        assert!((chsh_max_over_tensors(Sense::Minimize).unwrap() + 2.0).abs() < 1e-8);
    }

    #[test]
    fn white_noise_threshold() {
        let v = visibility_threshold(&singlet_chsh_joints(), 1e-6).unwrap();
        assert!((v - FRAC_1_SQRT_2).abs() < 1e-4, "{v}");
    }

    #[test]
    fn ghz_systems() {
        let r = ghz_contradiction_check().unwrap();
        let FeasibilityOutcome::Infeasible { certificate } = &r.full else {
            panic!("GHZ system must be infeasible");
        };
        assert!(r.full_problem.verify_certificate(certificate, 1e-8));
        assert!(r.relaxed.is_feasible());
        assert!((r.forced_xxx.0 + 1.0).abs() < 1e-8 && (r.forced_xxx.1 + 1.0).abs() < 1e-8);
        assert!(r.all_plus.is_feasible());
    }

    #[test]
    fn ghz_state_expectations() {
        let e = ghz_quantum_expectations().unwrap();
        for (got, want) in e.iter().zip([-1.0, -1.0, -1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn certificate_separates_quantum_from_local() {
        let joints = singlet_chsh_joints();
        let LocalityVerdict::Nonlocal { certificate, gap } = bell_locality_decide(&joints).unwrap().verdict else {
            panic!()
        };
        assert!(gap > 0.0);
        assert!((certificate_value(&certificate, &joints).unwrap() - gap).abs() < 1e-12);
        // any local joints score at most zero
        let local = joints.with_visibility(0.5);
        assert!(certificate_value(&certificate, &local).unwrap() <= 1e-9);
    }
}
