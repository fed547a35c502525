//! Conditional majorization steering criterion.
//!
//! For measurement pairs `(X_i, Y_i)` on a bipartite state, each block is
//! `Σ_j sort↓(q(y | x_j)) p(x_j)`, i.e. the sum of the descending-sorted rows
//! of the joint distribution. If the steering party cannot steer, the direct
//! sum of the blocks is majorized by the uncertainty bound of the steered
//! party's observables. A violation therefore certifies steering; holding
//! certifies nothing.

use std::f64::consts::PI;

use thiserror::Error;

use crate::families;
use crate::majorization::{
    self, compute_bound, direct_sum, majorizes, partial_sums, planar_qubit_bound, qubit_sparse_bound,
    sort_descending, MajorizationBound, MajorizationCheck, MajorizationError, SparseBound, UpperPartialSums,
    MAJORIZATION_TOL, MAX_POOL,
};
use crate::quantum::{joint_distribution, DensityMatrix, JointDistribution, ProbabilityVector, ProjectiveMeasurement, QuantumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteeringError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),

    #[error(transparent)]
    Majorization(#[from] MajorizationError),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("criterion is not monotone in eta near {eta}")]
    NonMonotone { eta: f64 },

    #[error("criterion is already violated at eta = 0")]
    ViolatedAtZero,

    #[error("family needs at least {min} measurements, got {got}")]
    FamilyTooSmall { min: usize, got: usize },

    #[error("extrapolation needs {0}")]
    Extrapolation(String),
}

pub type Result<T> = std::result::Result<T, SteeringError>;

/// Which party's measurement outcomes condition the other's statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ASteersB,
    BSteersA,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPair {
    pub a: ProjectiveMeasurement,
    pub b: ProjectiveMeasurement,
}

impl MeasurementPair {
    pub fn new(a: ProjectiveMeasurement, b: ProjectiveMeasurement) -> Self {
        Self { a, b }
    }
}

#[derive(Debug, Clone)]
pub struct SteeringScenario {
    state: DensityMatrix,
    pairs: Vec<MeasurementPair>,
    direction: Direction,
}

fn check_pairs(party_dims: &[usize], pairs: &[MeasurementPair]) -> Result<()> {
    if party_dims.len() != 2 {
        return Err(SteeringError::InvalidScenario(format!(
            "state has {} parties, expected 2",
            party_dims.len()
        )));
    }
    if pairs.is_empty() {
        return Err(SteeringError::InvalidScenario("no measurement pairs".into()));
    }
    for (i, p) in pairs.iter().enumerate() {
        if p.a.dim() != party_dims[0] || p.b.dim() != party_dims[1] {
            return Err(SteeringError::InvalidScenario(format!(
                "pair {i} acts on ({}, {}), state parties are {party_dims:?}",
                p.a.dim(),
                p.b.dim()
            )));
        }
    }
    Ok(())
}

impl SteeringScenario {
    pub fn new(state: DensityMatrix, pairs: Vec<MeasurementPair>, direction: Direction) -> Result<Self> {
        check_pairs(state.party_dims(), &pairs)?;
        Ok(Self {
            state,
            pairs,
            direction,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn pairs(&self) -> &[MeasurementPair] {
        &self.pairs
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn reversed(&self) -> Self {
        Self {
            direction: match self.direction {
                Direction::ASteersB => Direction::BSteersA,
                Direction::BSteersA => Direction::ASteersB,
            },
            ..self.clone()
        }
    }

    /// Observables of the steered party.
    pub fn steered_observables(&self) -> Vec<ProjectiveMeasurement> {
        steered_observables(&self.pairs, self.direction)
    }

    /// Joint distributions with the steering party's outcome as row index.
    pub fn oriented_joints(&self) -> Result<Vec<JointDistribution>> {
        oriented_joints(&self.state, &self.pairs, self.direction)
    }
}

fn steered_observables(pairs: &[MeasurementPair], direction: Direction) -> Vec<ProjectiveMeasurement> {
    pairs
        .iter()
        .map(|p| match direction {
            Direction::ASteersB => p.b.clone(),
            Direction::BSteersA => p.a.clone(),
        })
        .collect()
}

fn oriented_joints(state: &DensityMatrix, pairs: &[MeasurementPair], direction: Direction) -> Result<Vec<JointDistribution>> {
    pairs
        .iter()
        .map(|p| {
            let joint = joint_distribution(state, &[&p.a, &p.b])?;
            Ok(match direction {
                Direction::ASteersB => joint,
                Direction::BSteersA => joint.transposed(),
            })
        })
        .collect()
}

/// `Σ_j sort↓(row_j)`. A zero row is the zero vector, so outcomes of zero
/// probability drop out.
pub fn conditional_block(joint: &JointDistribution) -> Vec<f64> {
    let (rows, cols) = (joint.outcome_counts()[0], joint.outcome_counts()[1]);
    let mut block = vec![0.0; cols];
    for i in 0..rows {
        let mut row = joint.row(i);
        row.sort_by(|a, b| b.total_cmp(a));
        for (acc, v) in block.iter_mut().zip(row) {
            *acc += v;
        }
    }
    block
}

fn lhs_from_joints(joints: &[JointDistribution]) -> Result<ProbabilityVector> {
    let blocks = joints
        .iter()
        .map(|j| ProbabilityVector::normalized(conditional_block(j), 1e-9))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(direct_sum(&blocks))
}

/// Direct sum over pairs of the sorted, weighted conditional distributions.
pub fn conditional_lhs(scenario: &SteeringScenario) -> Result<ProbabilityVector> {
    lhs_from_joints(&scenario.oriented_joints()?)
}

/// An uncertainty bound, either complete or known at selected `k` only.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Full(MajorizationBound),
    Sparse(SparseBound),
}

impl UpperPartialSums for Bound {
    fn total(&self) -> f64 {
        match self {
            Self::Full(b) => b.total(),
            Self::Sparse(b) => b.total(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Self::Full(b) => b.len(),
            Self::Sparse(b) => b.len(),
        }
    }

    fn upper_partial_sum(&self, k: usize) -> Option<f64> {
        match self {
            Self::Full(b) => b.upper_partial_sum(k),
            Self::Sparse(b) => b.upper_partial_sum(k),
        }
    }
}

/// Exhaustive subset bound when the pool is small enough, otherwise the
/// exact qubit geometry: all `k` for coplanar directions, `k = M` in general.
pub fn auto_bound(observables: &[ProjectiveMeasurement]) -> Result<Bound> {
    let pool: usize = observables.iter().map(ProjectiveMeasurement::outcome_count).sum();
    if pool <= MAX_POOL {
        return Ok(Bound::Full(compute_bound(observables)?));
    }
    match planar_qubit_bound(observables) {
        Ok(b) => Ok(Bound::Full(b)),
        Err(MajorizationError::NotCoplanar(_)) => Ok(Bound::Sparse(qubit_sparse_bound(observables)?)),
        Err(MajorizationError::NotQubit(_)) => Err(MajorizationError::PoolTooLarge {
            size: pool,
            limit: MAX_POOL,
        }
        .into()),
        Err(e) => Err(e.into()),
    }
}

/// Per-`k` comparison of the conditional vector against a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub direction: Direction,
    /// Descending, total `M`.
    pub lhs_sorted: Vec<f64>,
    /// `S_k` for `k = 1..=len`; `None` where the bound is silent.
    pub bound_partial: Vec<Option<f64>>,
    pub holds: bool,
    pub worst_k: usize,
    /// Largest partial-sum excess, zero when the criterion holds.
    pub violation: f64,
    pub slack: f64,
}

impl CriterionReport {
    fn new(direction: Direction, lhs: &ProbabilityVector, bound: &dyn UpperPartialSums, check: MajorizationCheck) -> Self {
        let len = bound.len();
        Self {
            direction,
            lhs_sorted: sort_descending(lhs).into_components(),
            bound_partial: (1..=len)
                .map(|k| if k == len { Some(bound.total()) } else { bound.upper_partial_sum(k) })
                .collect(),
            holds: check.holds,
            worst_k: check.worst_k,
            violation: check.violation(),
            slack: check.slack,
        }
    }

    pub fn lhs_partial_sums(&self) -> Vec<f64> {
        partial_sums(&self.lhs_sorted)
    }

    /// Rows `(k, lhs_partial, bound_partial, slack)`.
    pub fn rows(&self) -> Vec<(usize, f64, Option<f64>, Option<f64>)> {
        self.lhs_partial_sums()
            .into_iter()
            .zip(&self.bound_partial)
            .enumerate()
            .map(|(i, (a, b))| (i + 1, a, *b, b.map(|b| b - a)))
            .collect()
    }
}

pub fn steering_check_with_bound(scenario: &SteeringScenario, bound: &dyn UpperPartialSums, tol: f64) -> Result<CriterionReport> {
    let lhs = conditional_lhs(scenario)?;
    let check = majorizes(&lhs, bound, tol)?;
    Ok(CriterionReport::new(scenario.direction, &lhs, bound, check))
}

pub fn steering_check(scenario: &SteeringScenario) -> Result<CriterionReport> {
    let bound = auto_bound(&scenario.steered_observables())?;
    steering_check_with_bound(scenario, &bound, MAJORIZATION_TOL)
}

/// Both directions; a violation in either certifies one-way steering.
pub fn two_way_check(state: &DensityMatrix, pairs: &[MeasurementPair]) -> Result<(CriterionReport, CriterionReport)> {
    let ab = SteeringScenario::new(state.clone(), pairs.to_vec(), Direction::ASteersB)?;
    Ok((steering_check(&ab)?, steering_check(&ab.reversed())?))
}

/// One-parameter state family on `η ∈ [0, 1]`.
pub enum StateFamily {
    /// `(1-η)·at_zero + η·at_one`; joints are interpolated, not recomputed.
    Affine { at_zero: DensityMatrix, at_one: DensityMatrix },
    General(Box<dyn Fn(f64) -> std::result::Result<DensityMatrix, QuantumError> + Send + Sync>),
}

impl StateFamily {
    pub fn qubit_werner() -> Self {
        Self::Affine {
            at_zero: families::qubit_werner(0.0).expect("valid"),
            at_one: families::qubit_werner(1.0).expect("valid"),
        }
    }

    pub fn isotropic(d: usize) -> Self {
        Self::Affine {
            at_zero: families::isotropic(d, 0.0).expect("valid"),
            at_one: families::isotropic(d, 1.0).expect("valid"),
        }
    }

    pub fn qutrit_werner() -> Self {
        Self::Affine {
            at_zero: families::qutrit_werner(0.0).expect("valid"),
            at_one: families::qutrit_werner(1.0).expect("valid"),
        }
    }

    pub fn state(&self, eta: f64) -> Result<DensityMatrix> {
        match self {
            Self::Affine { at_zero, at_one } => Ok(at_one.mix(at_zero, eta)?),
            Self::General(f) => Ok(f(eta)?),
        }
    }

    fn party_dims(&self) -> Result<Vec<usize>> {
        Ok(self.state(0.0)?.party_dims().to_vec())
    }
}

/// Evaluates the criterion along a family with a fixed bound.
pub struct FamilyEvaluator<'a> {
    family: &'a StateFamily,
    pairs: &'a [MeasurementPair],
    direction: Direction,
    bound: &'a dyn UpperPartialSums,
    endpoints: Option<(Vec<JointDistribution>, Vec<JointDistribution>)>,
}

impl<'a> FamilyEvaluator<'a> {
    pub fn new(
        family: &'a StateFamily,
        pairs: &'a [MeasurementPair],
        direction: Direction,
        bound: &'a dyn UpperPartialSums,
    ) -> Result<Self> {
        check_pairs(&family.party_dims()?, pairs)?;
        let endpoints = match family {
            StateFamily::Affine { at_zero, at_one } => Some((
                oriented_joints(at_zero, pairs, direction)?,
                oriented_joints(at_one, pairs, direction)?,
            )),
            StateFamily::General(_) => None,
        };
        Ok(Self {
            family,
            pairs,
            direction,
            bound,
            endpoints,
        })
    }

    pub fn lhs(&self, eta: f64) -> Result<ProbabilityVector> {
        let joints = match &self.endpoints {
            Some((zero, one)) => one.iter().zip(zero).map(|(p1, p0)| p1.mix(p0, eta)).collect(),
            None => oriented_joints(&self.family.state(eta)?, self.pairs, self.direction)?,
        };
        lhs_from_joints(&joints)
    }

    pub fn check(&self, eta: f64) -> Result<MajorizationCheck> {
        Ok(majorizes(&self.lhs(eta)?, self.bound, MAJORIZATION_TOL)?)
    }

    pub fn report(&self, eta: f64) -> Result<CriterionReport> {
        let lhs = self.lhs(eta)?;
        let check = majorizes(&lhs, self.bound, MAJORIZATION_TOL)?;
        Ok(CriterionReport::new(self.direction, &lhs, self.bound, check))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Intervals of the monotonicity pre-scan on `[0, 1]`.
    pub grid: usize,
    /// Bisection width.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { grid: 100, tol: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan {
    /// Largest `η` found with the criterion holding.
    pub threshold: f64,
    /// `(η, violation)` on the pre-scan grid.
    pub grid: Vec<(f64, f64)>,
}

/// Bisects for the largest `η` where the criterion holds, after checking on
/// a grid that the violation is non-decreasing in `η`.
pub fn threshold_scan(evaluator: &FamilyEvaluator<'_>, options: ScanOptions) -> Result<ThresholdScan> {
    let grid_n = options.grid.max(1);
    let mut grid = Vec::with_capacity(grid_n + 1);
    let mut last_holding = None;
    let mut first_violated = None;
    let mut prev_violation = 0.0;
    for step in 0..=grid_n {
        let eta = step as f64 / grid_n as f64;
        let check = evaluator.check(eta)?;
        let v = check.violation();
        if v < prev_violation - 1e-12 || (check.holds && first_violated.is_some()) {
            return Err(SteeringError::NonMonotone { eta });
        }
        prev_violation = v;
        if check.holds {
            last_holding = Some(eta);
        } else if first_violated.is_none() {
            first_violated = Some(eta);
        }
        grid.push((eta, v));
    }
    let Some(mut lo) = last_holding else {
        return Err(SteeringError::ViolatedAtZero);
    };
    let Some(mut hi) = first_violated else {
        return Ok(ThresholdScan { threshold: 1.0, grid });
    };
    while hi - lo > options.tol {
        let mid = 0.5 * (lo + hi);
        if evaluator.check(mid)?.holds {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdScan { threshold: lo, grid })
}

/// Same measurement on both sides, the natural choice for Werner states.
pub fn werner_pairs(observables: &[ProjectiveMeasurement]) -> Vec<MeasurementPair> {
    observables.iter().map(|m| MeasurementPair::new(m.clone(), m.clone())).collect()
}

/// Complex-conjugate basis on A: `|ψ⁺⟩` correlates `|a*⟩` with `|a⟩`.
pub fn isotropic_pairs(observables: &[ProjectiveMeasurement]) -> Vec<MeasurementPair> {
    observables.iter().map(|m| MeasurementPair::new(m.conjugate(), m.clone())).collect()
}

fn bloch(n: [f64; 3]) -> ProjectiveMeasurement {
    ProjectiveMeasurement::bloch(n).expect("unit direction")
}

/// `n` directions equally spaced over a half-turn of the x–y plane.
pub fn planar_family(n: usize) -> Result<Vec<ProjectiveMeasurement>> {
    if n < 2 {
        return Err(SteeringError::FamilyTooSmall { min: 2, got: n });
    }
    Ok((0..n)
        .map(|i| {
            let th = PI * i as f64 / n as f64;
            bloch([th.cos(), th.sin(), 0.0])
        })
        .collect())
}

/// One direction from each antipodal vertex pair of a regular icosahedron.
pub fn icosahedron_family() -> Vec<ProjectiveMeasurement> {
    icosahedron_directions().into_iter().map(bloch).collect()
}

pub fn icosahedron_directions() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let r = (1.0 + phi * phi).sqrt();
    [
        [0.0, 1.0, phi],
        [0.0, 1.0, -phi],
        [1.0, phi, 0.0],
        [1.0, -phi, 0.0],
        [phi, 0.0, 1.0],
        [phi, 0.0, -1.0],
    ]
    .into_iter()
    .map(|v| [v[0] / r, v[1] / r, v[2] / r])
    .collect()
}

/// `n` near-uniform directions on the upper hemisphere (Fibonacci spiral).
pub fn sphere_family(n: usize) -> Result<Vec<ProjectiveMeasurement>> {
    if n < 3 {
        return Err(SteeringError::FamilyTooSmall { min: 3, got: n });
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    Ok((0..n)
        .map(|i| {
            let z = (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let ph = golden * i as f64;
            bloch([r * ph.cos(), r * ph.sin(), z])
        })
        .collect())
}

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// `(1/π) ∫_{-π/2}^{π/2} cos²(θ/2) dθ`, the mean overlap over a half-turn.
pub fn planar_mean_overlap() -> f64 {
    simpson(|t| (t / 2.0).cos().powi(2), -PI / 2.0, PI / 2.0, 2000) / PI
}

/// `(1/2π) ∫_0^{π/2} ∫_0^{2π} cos²(θ/2) sin θ dφ dθ`, the mean overlap over
/// a hemisphere.
pub fn hemisphere_mean_overlap() -> f64 {
    let inner = |t: f64| simpson(|_| (t / 2.0).cos().powi(2) * t.sin(), 0.0, 2.0 * PI, 8);
    simpson(inner, 0.0, PI / 2.0, 2000) / (2.0 * PI)
}

/// Werner threshold implied by a mean overlap `c`: `(1+η)/2 ≤ c`.
pub fn threshold_from_overlap(c: f64) -> f64 {
    2.0 * c - 1.0
}

/// `η∞` from three values at geometrically spaced `n`, fitting
/// `η(n) = η∞ + c·n^{-p}`.
pub fn richardson_extrapolate(points: &[(f64, f64)]) -> Result<f64> {
    let [(n1, y1), (n2, y2), (n3, y3)] = points else {
        return Err(SteeringError::Extrapolation("exactly three points".into()));
    };
    let r = n2 / n1;
    if ((n3 / n2) - r).abs() > 1e-9 * r || r <= 1.0 {
        return Err(SteeringError::Extrapolation("geometric spacing n1 < n2 < n3".into()));
    }
    let (d1, d2) = (y1 - y2, y2 - y3);
    if d2 == 0.0 {
        return Ok(*y3);
    }
    if d1 * d2 <= 0.0 || d1.abs() <= d2.abs() {
        return Err(SteeringError::Extrapolation("monotonically converging values".into()));
    }
    let p = (d1 / d2).ln() / r.ln();
    Ok(y3 - d2 / (r.powf(p) - 1.0))
}

/// Werner threshold for identical-direction qubit pairs from the bound
/// alone: blocks are `((1+η)/2, (1-η)/2)` and only `k = M` binds.
pub fn werner_threshold_from_bound(bound: &dyn UpperPartialSums) -> Option<f64> {
    let m = bound.total();
    let s_m = bound.upper_partial_sum(m.round() as usize)?;
    Some((2.0 * s_m / m - 1.0).min(1.0))
}

/// A named threshold computed by the criterion next to its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub state: &'static str,
    pub measurements: String,
    pub computed: f64,
    pub expected: f64,
}

impl TableRow {
    pub fn error(&self) -> f64 {
        (self.computed - self.expected).abs()
    }
}

pub fn scan_family(
    family: &StateFamily,
    pairs: &[MeasurementPair],
    bound: &dyn UpperPartialSums,
    options: ScanOptions,
) -> Result<f64> {
    let eval = FamilyEvaluator::new(family, pairs, Direction::ASteersB, bound)?;
    Ok(threshold_scan(&eval, options)?.threshold)
}

/// Planar threshold for `n` equally spaced directions.
pub fn planar_threshold(n: usize, options: ScanOptions) -> Result<f64> {
    let obs = planar_family(n)?;
    let bound = auto_bound(&obs)?;
    scan_family(&StateFamily::qubit_werner(), &werner_pairs(&obs), &bound, options)
}

/// Hemisphere threshold for `n` Fibonacci directions.
pub fn sphere_threshold(n: usize, options: ScanOptions) -> Result<f64> {
    let obs = sphere_family(n)?;
    let bound = auto_bound(&obs)?;
    scan_family(&StateFamily::qubit_werner(), &werner_pairs(&obs), &bound, options)
}

/// Sizes used for continuum extrapolations.
pub const CONTINUUM_SIZES: [usize; 3] = [100, 1000, 10000];

/// Every threshold of the benchmark suite with its closed form.
pub fn table1(options: ScanOptions, continuum: &[usize; 3]) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    let werner = StateFamily::qubit_werner();
    let iso2 = StateFamily::isotropic(2);
    let xy = vec![ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()];
    let mub2 = families::mub_family(2)?;
    let ico = icosahedron_family();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let finite: [(&str, &Vec<ProjectiveMeasurement>, f64); 3] = [
        ("sigma_x, sigma_y", &xy, 1.0 / s2),
        ("qubit MUB", &mub2, 1.0 / s3),
        ("icosahedron", &ico, (s5 + 3.0) / (3.0 * (s5 + 1.0))),
    ];
    for (label, obs, expected) in finite {
        let bound = auto_bound(obs)?;
        rows.push(TableRow {
            state: "qubit Werner",
            measurements: label.into(),
            computed: scan_family(&werner, &werner_pairs(obs), &bound, options)?,
            expected,
        });
        rows.push(TableRow {
            state: "qubit isotropic",
            measurements: label.into(),
            computed: scan_family(&iso2, &isotropic_pairs(obs), &bound, options)?,
            expected,
        });
    }

    let planar: Vec<(f64, f64)> = continuum
        .iter()
        .map(|&n| Ok((n as f64, planar_threshold(n, options)?)))
        .collect::<Result<_>>()?;
    rows.push(TableRow {
        state: "qubit Werner",
        measurements: format!("2D planar, n = {}", continuum[2]),
        computed: planar[2].1,
        expected: 2.0 / PI,
    });
    rows.push(TableRow {
        state: "qubit Werner",
        measurements: "2D planar, extrapolated".into(),
        computed: richardson_extrapolate(&planar)?,
        expected: 2.0 / PI,
    });
    rows.push(TableRow {
        state: "qubit Werner",
        measurements: "2D planar, quadrature".into(),
        computed: threshold_from_overlap(planar_mean_overlap()),
        expected: 2.0 / PI,
    });
    let sphere: Vec<(f64, f64)> = continuum
        .iter()
        .map(|&n| Ok((n as f64, sphere_threshold(n, options)?)))
        .collect::<Result<_>>()?;
    rows.push(TableRow {
        state: "qubit Werner",
        measurements: format!("3D hemisphere, n = {}", continuum[2]),
        computed: sphere[2].1,
        expected: 0.5,
    });
    rows.push(TableRow {
        state: "qubit Werner",
        measurements: "3D hemisphere, extrapolated".into(),
        computed: richardson_extrapolate(&sphere)?,
        expected: 0.5,
    });
    rows.push(TableRow {
        state: "qubit Werner",
        measurements: "3D hemisphere, quadrature".into(),
        computed: threshold_from_overlap(hemisphere_mean_overlap()),
        expected: 0.5,
    });

    let mub3 = families::mub_family(3)?;
    let bound3 = auto_bound(&mub3)?;
    rows.push(TableRow {
        state: "qutrit Werner",
        measurements: "qutrit MUB".into(),
        computed: scan_family(&StateFamily::qutrit_werner(), &werner_pairs(&mub3), &bound3, options)?,
        expected: 1.0,
    });
    rows.push(TableRow {
        state: "qutrit isotropic",
        measurements: "qutrit MUB".into(),
        computed: scan_family(&StateFamily::isotropic(3), &isotropic_pairs(&mub3), &bound3, options)?,
        expected: (3.0 * s5 + 1.0) / 16.0,
    });
    Ok(rows)
}

/// Re-export for callers that only need the bound routes.
pub use majorization::max_signed_sum;
