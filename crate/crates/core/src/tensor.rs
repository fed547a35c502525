//! Magic-square probability tensors.
//!
//! A tensor holds one outcome index per (party, measurement) slot. Slots are
//! laid out party-major then measurement-major, and the flat storage is
//! row-major over that slot order, so for two parties with two measurements
//! each the cell `(i1, i2, j1, j2)` sits at `((i1·n + i2)·n + j1)·n + j2`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{DensityMatrix, JointDistribution};

pub const TENSOR_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid tensor values: {0}")]
    InvalidValues(String),

    #[error("invalid local model: {0}")]
    InvalidModel(String),

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("cell {cell} appears in both the plus and minus node sets")]
    OverlappingSelection { cell: usize },

    #[error("party {party} measurement {measurement} has {outcomes} outcomes, expected 2")]
    NotDichotomic {
        party: usize,
        measurement: usize,
        outcomes: usize,
    },
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Outcome counts indexed by party, then measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorShape {
    outcomes: Vec<Vec<usize>>,
}

impl TensorShape {
    pub fn new(outcomes: Vec<Vec<usize>>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.iter().any(|p| p.is_empty()) {
            return Err(TensorError::ShapeMismatch("every party needs at least one measurement".into()));
        }
        if outcomes.iter().flatten().any(|&n| n == 0) {
            return Err(TensorError::ShapeMismatch("measurement with zero outcomes".into()));
        }
        Ok(Self { outcomes })
    }

    /// Same number of measurements and outcomes for every party.
    pub fn uniform(parties: usize, measurements: usize, outcomes: usize) -> Self {
        Self::new(vec![vec![outcomes; measurements]; parties]).expect("non-empty uniform shape")
    }

    pub fn party_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn measurement_count(&self, party: usize) -> usize {
        self.outcomes[party].len()
    }

    pub fn outcome_count(&self, party: usize, measurement: usize) -> usize {
        self.outcomes[party][measurement]
    }

    pub fn outcomes(&self) -> &[Vec<usize>] {
        &self.outcomes
    }

    /// Outcome counts in slot order.
    pub fn slot_sizes(&self) -> Vec<usize> {
        self.outcomes.iter().flatten().copied().collect()
    }

    pub fn slot_count(&self) -> usize {
        self.outcomes.iter().map(Vec::len).sum()
    }

    /// Position of `(party, measurement)` in the slot order.
    pub fn slot(&self, party: usize, measurement: usize) -> Option<usize> {
        if party >= self.party_count() || measurement >= self.measurement_count(party) {
            return None;
        }
        Some(self.outcomes[..party].iter().map(Vec::len).sum::<usize>() + measurement)
    }

    pub fn cell_count(&self) -> usize {
        self.outcomes.iter().flatten().product()
    }

    /// Outcome index of every slot for a flat cell index.
    pub fn decode(&self, mut cell: usize) -> Vec<usize> {
        let sizes = self.slot_sizes();
        let mut idx = vec![0; sizes.len()];
        for (slot, &n) in idx.iter_mut().zip(&sizes).rev() {
            *slot = cell % n;
            cell /= n;
        }
        idx
    }

    pub fn encode(&self, index: &[usize]) -> usize {
        let sizes = self.slot_sizes();
        assert_eq!(index.len(), sizes.len(), "index arity");
        index.iter().zip(&sizes).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    fn check_dichotomic(&self, party: usize, measurement: usize) -> Result<()> {
        let outcomes = self.outcome_count(party, measurement);
        if outcomes != 2 {
            return Err(TensorError::NotDichotomic {
                party,
                measurement,
                outcomes,
            });
        }
        Ok(())
    }

    /// Maps every cell to the flat index of its outcome tuple on the kept
    /// `(party, measurement)` slots. Returns the marginal's outcome counts.
    pub fn marginal_map(&self, keep: &[(usize, usize)]) -> Result<(Vec<usize>, Vec<usize>)> {
        if keep.is_empty() {
            return Err(TensorError::InvalidSelection("nothing to keep".into()));
        }
        let mut slots = Vec::with_capacity(keep.len());
        for (k, &(party, meas)) in keep.iter().enumerate() {
            if keep[..k].iter().any(|&(p, _)| p == party) {
                return Err(TensorError::InvalidSelection(format!(
                    "party {party} selected more than once"
                )));
            }
            let slot = self.slot(party, meas).ok_or_else(|| {
                TensorError::InvalidSelection(format!("no measurement {meas} for party {party}"))
            })?;
            slots.push(slot);
        }
        let sizes = self.slot_sizes();
        let counts: Vec<usize> = slots.iter().map(|&s| sizes[s]).collect();
        let map = (0..self.cell_count())
            .map(|cell| {
                let idx = self.decode(cell);
                slots.iter().zip(&counts).fold(0, |acc, (&s, &n)| acc * n + idx[s])
            })
            .collect();
        Ok((counts, map))
    }

    /// `±1` per cell: the product of the `(+1, -1)` labels of the chosen
    /// measurement of every party, i.e. `(-1)^(Σ outcome indices)`.
    pub fn parity_coefficients(&self, pattern: &[usize]) -> Result<Vec<f64>> {
        if pattern.len() != self.party_count() {
            return Err(TensorError::InvalidSelection(format!(
                "pattern names {} parties, tensor has {}",
                pattern.len(),
                self.party_count()
            )));
        }
        let mut slots = Vec::with_capacity(pattern.len());
        for (party, &meas) in pattern.iter().enumerate() {
            let slot = self.slot(party, meas).ok_or_else(|| {
                TensorError::InvalidSelection(format!("no measurement {meas} for party {party}"))
            })?;
            self.check_dichotomic(party, meas)?;
            slots.push(slot);
        }
        Ok((0..self.cell_count())
            .map(|cell| {
                let idx = self.decode(cell);
                let flips: usize = slots.iter().map(|&s| idx[s]).sum();
                if flips.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect())
    }

    /// Coefficients of `E(x_a, y_b)` for parties 0 and 1.
    pub fn correlation_coefficients(&self, meas_a: usize, meas_b: usize) -> Result<Vec<f64>> {
        if self.party_count() < 2 {
            return Err(TensorError::ShapeMismatch("correlation needs two parties".into()));
        }
        let mut pattern = vec![usize::MAX; self.party_count()];
        pattern[0] = meas_a;
        pattern[1] = meas_b;
        for slot in pattern.iter_mut().skip(2) {
            *slot = 0;
        }
        let sa = self
            .slot(0, meas_a)
            .ok_or_else(|| TensorError::InvalidSelection(format!("no measurement {meas_a} for party 0")))?;
        let sb = self
            .slot(1, meas_b)
            .ok_or_else(|| TensorError::InvalidSelection(format!("no measurement {meas_b} for party 1")))?;
        self.check_dichotomic(0, meas_a)?;
        self.check_dichotomic(1, meas_b)?;
        Ok((0..self.cell_count())
            .map(|cell| {
                let idx = self.decode(cell);
                if (idx[sa] + idx[sb]).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect())
    }

    fn require_chsh(&self) -> Result<()> {
        if *self != Self::uniform(2, 2, 2) {
            return Err(TensorError::ShapeMismatch(
                "CHSH needs 2 parties x 2 measurements x 2 outcomes".into(),
            ));
        }
        Ok(())
    }

    /// Coefficients of `S = E(x,y) - E(x,y') + E(x',y) + E(x',y')`.
    pub fn chsh_coefficients(&self) -> Result<Vec<f64>> {
        self.require_chsh()?;
        let terms = [(0, 0, 1.0), (0, 1, -1.0), (1, 0, 1.0), (1, 1, 1.0)];
        let mut out = vec![0.0; self.cell_count()];
        for (a, b, sign) in terms {
            for (o, c) in out.iter_mut().zip(self.correlation_coefficients(a, b)?) {
                *o += sign * c;
            }
        }
        Ok(out)
    }
}

/// Non-negative, normalized tensor over the slots of a [`TensorShape`].
#[derive(Debug, Clone, PartialEq)]
pub struct MagicSquareTensor {
    shape: TensorShape,
    values: Vec<f64>,
}

impl MagicSquareTensor {
    pub fn new(shape: TensorShape, values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(shape, values, TENSOR_TOL)
    }

    pub fn with_tolerance(shape: TensorShape, values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.len() != shape.cell_count() {
            return Err(TensorError::ShapeMismatch(format!(
                "{} values for {} cells",
                values.len(),
                shape.cell_count()
            )));
        }
        if let Some((cell, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < -tol) {
            return Err(TensorError::InvalidValues(format!("cell {cell} = {v}")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(TensorError::InvalidValues(format!("entries sum to {total}")));
        }
        Ok(Self { shape, values })
    }

    /// The point mass on one cell.
    pub fn deterministic(shape: TensorShape, index: &[usize]) -> Result<Self> {
        let sizes = shape.slot_sizes();
        if index.len() != sizes.len() || index.iter().zip(&sizes).any(|(&i, &n)| i >= n) {
            return Err(TensorError::InvalidSelection(format!("index {index:?} outside shape")));
        }
        let mut values = vec![0.0; shape.cell_count()];
        values[shape.encode(index)] = 1.0;
        Ok(Self { shape, values })
    }

    pub fn uniform(shape: TensorShape) -> Self {
        let n = shape.cell_count();
        Self {
            shape,
            values: vec![1.0 / n as f64; n],
        }
    }

    /// Flat Dirichlet(1, …, 1) sample over all cells.
    pub fn random<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> Self {
        let mut values: Vec<f64> = (0..shape.cell_count()).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= total);
        Self { shape, values }
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.shape.encode(index)]
    }

    /// Sums out every slot except one measurement per kept party.
    pub fn marginal(&self, keep: &[(usize, usize)]) -> Result<JointDistribution> {
        let (counts, map) = self.shape.marginal_map(keep)?;
        let mut values = vec![0.0; counts.iter().product()];
        for (v, &target) in self.values.iter().zip(&map) {
            values[target] += v;
        }
        JointDistribution::new(counts, values).map_err(|e| TensorError::InvalidValues(e.to_string()))
    }

    pub fn dot(&self, coefficients: &[f64]) -> f64 {
        self.values.iter().zip(coefficients).map(|(v, c)| v * c).sum()
    }

    pub fn node_sum(&self, selection: &NodeSelection) -> f64 {
        let plus: f64 = selection.plus.iter().map(|&c| self.values[c]).sum();
        let minus: f64 = selection.minus.iter().map(|&c| self.values[c]).sum();
        plus - minus
    }

    /// `E(x_a, y_b) = Σ (-1)^{i+j} m`, parties 0 and 1.
    pub fn correlation(&self, meas_a: usize, meas_b: usize) -> Result<f64> {
        let sel = NodeSelection::from_signs(&self.shape, &self.shape.correlation_coefficients(meas_a, meas_b)?)?;
        Ok(self.node_sum(&sel))
    }

    pub fn chsh_value(&self) -> Result<f64> {
        self.shape.require_chsh()?;
        Ok(self.correlation(0, 0)? - self.correlation(0, 1)? + self.correlation(1, 0)? + self.correlation(1, 1)?)
    }

    /// `⟨O_1 O_2 …⟩` for the measurement `pattern[p]` of every party `p`.
    pub fn parity_expectation(&self, pattern: &[usize]) -> Result<f64> {
        let sel = NodeSelection::from_signs(&self.shape, &self.shape.parity_coefficients(pattern)?)?;
        Ok(self.node_sum(&sel))
    }
}

/// Disjoint plus/minus cell sets of a signed node sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSelection {
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl NodeSelection {
    pub fn new(shape: &TensorShape, plus: Vec<usize>, minus: Vec<usize>) -> Result<Self> {
        let n = shape.cell_count();
        let mut seen = vec![0u8; n];
        for (&c, tag) in plus.iter().map(|c| (c, 1u8)).chain(minus.iter().map(|c| (c, 2u8))) {
            if c >= n {
                return Err(TensorError::InvalidSelection(format!("cell {c} outside {n} cells")));
            }
            if seen[c] != 0 && seen[c] != tag {
                return Err(TensorError::OverlappingSelection { cell: c });
            }
            if seen[c] == tag {
                return Err(TensorError::InvalidSelection(format!("cell {c} listed twice")));
            }
            seen[c] = tag;
        }
        Ok(Self { plus, minus })
    }

    /// Cells with coefficient `+1` go to plus, `-1` to minus, `0` nowhere.
    pub fn from_signs(shape: &TensorShape, signs: &[f64]) -> Result<Self> {
        let plus = signs.iter().enumerate().filter(|(_, &s)| s > 0.0).map(|(c, _)| c).collect();
        let minus = signs.iter().enumerate().filter(|(_, &s)| s < 0.0).map(|(c, _)| c).collect();
        Self::new(shape, plus, minus)
    }

    pub fn plus(&self) -> &[usize] {
        &self.plus
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }
}

/// Finite local-hidden-variable model.
///
/// `responses[λ][party][measurement]` is the outcome distribution of that
/// measurement under hidden value `λ`. Optional hidden states make it a
/// local-hidden-state model for the last party.
#[derive(Debug, Clone)]
pub struct LhvModel {
    weights: Vec<f64>,
    responses: Vec<Vec<Vec<Vec<f64>>>>,
    hidden_states: Option<Vec<DensityMatrix>>,
}

impl LhvModel {
    pub fn new(weights: Vec<f64>, responses: Vec<Vec<Vec<Vec<f64>>>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != responses.len() {
            return Err(TensorError::InvalidModel(format!(
                "{} weights for {} hidden values",
                weights.len(),
                responses.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < -TENSOR_TOL) {
            return Err(TensorError::InvalidModel("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TENSOR_TOL {
            return Err(TensorError::InvalidModel(format!("weights sum to {total}")));
        }
        let shape_of = |block: &Vec<Vec<Vec<f64>>>| -> Vec<Vec<usize>> {
            block.iter().map(|p| p.iter().map(Vec::len).collect()).collect()
        };
        let reference = shape_of(&responses[0]);
        TensorShape::new(reference.clone())?;
        for (lambda, block) in responses.iter().enumerate() {
            if shape_of(block) != reference {
                return Err(TensorError::ShapeMismatch(format!(
                    "hidden value {lambda} has shape {:?}, expected {reference:?}",
                    shape_of(block)
                )));
            }
            for dist in block.iter().flatten() {
                let s: f64 = dist.iter().sum();
                if dist.iter().any(|p| !p.is_finite() || *p < -TENSOR_TOL) || (s - 1.0).abs() > TENSOR_TOL {
                    return Err(TensorError::InvalidModel(format!(
                        "hidden value {lambda} has an unnormalized response {dist:?}"
                    )));
                }
            }
        }
        Ok(Self {
            weights,
            responses,
            hidden_states: None,
        })
    }

    /// Attaches one hidden state per `λ`.
    pub fn with_hidden_states(mut self, states: Vec<DensityMatrix>) -> Result<Self> {
        if states.len() != self.weights.len() {
            return Err(TensorError::InvalidModel(format!(
                "{} hidden states for {} hidden values",
                states.len(),
                self.weights.len()
            )));
        }
        self.hidden_states = Some(states);
        Ok(self)
    }

    /// Single hidden value with deterministic outcomes `outcome[party][meas]`.
    pub fn deterministic(shape: &TensorShape, outcome: &[Vec<usize>]) -> Result<Self> {
        let block = shape
            .outcomes()
            .iter()
            .zip(outcome)
            .map(|(counts, chosen)| {
                counts
                    .iter()
                    .zip(chosen)
                    .map(|(&n, &o)| (0..n).map(|k| if k == o { 1.0 } else { 0.0 }).collect())
                    .collect()
            })
            .collect();
        Self::new(vec![1.0], vec![block])
    }

    /// Random model: Dirichlet weights and Dirichlet responses.
    pub fn random<R: Rng + ?Sized>(shape: &TensorShape, hidden_values: usize, rng: &mut R) -> Self {
        let mut simplex = |n: usize| -> Vec<f64> {
            let v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        };
        let weights = simplex(hidden_values);
        let responses = (0..hidden_values)
            .map(|_| {
                shape
                    .outcomes()
                    .iter()
                    .map(|p| p.iter().map(|&n| simplex(n)).collect())
                    .collect()
            })
            .collect();
        Self::new(weights, responses).expect("sampled model is valid")
    }

    pub fn shape(&self) -> TensorShape {
        TensorShape::new(
            self.responses[0]
                .iter()
                .map(|p| p.iter().map(Vec::len).collect())
                .collect(),
        )
        .expect("validated at construction")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn responses(&self) -> &[Vec<Vec<Vec<f64>>>] {
        &self.responses
    }

    pub fn hidden_states(&self) -> Option<&[DensityMatrix]> {
        self.hidden_states.as_deref()
    }
}

/// `m = Σ_λ κ_λ Π_{(party, meas)} p^{(λ)}(outcome)`.
pub fn build_from_lhv(model: &LhvModel) -> MagicSquareTensor {
    let shape = model.shape();
    let n = shape.cell_count();
    let mut values = vec![0.0; n];
    for (w, block) in model.weights.iter().zip(&model.responses) {
        let slots: Vec<&Vec<f64>> = block.iter().flatten().collect();
        for (cell, v) in values.iter_mut().enumerate() {
            let idx = shape.decode(cell);
            *v += w * slots.iter().zip(&idx).map(|(dist, &o)| dist[o]).product::<f64>();
        }
    }
    MagicSquareTensor { shape, values }
}
