//! Dense two-phase simplex for `A x = b, x ≥ 0`.
//!
//! Pivoting uses Bland's rule, so degenerate problems terminate. Infeasible
//! problems come back with a Farkas certificate `y` such that `yᵀA ≤ 0` and
//! `yᵀb > 0`, read off the phase-one duals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_ITERATIONS: usize = 1_000_000;
pub const FEASIBILITY_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint matrix has {rows} rows but right-hand side has {rhs} entries")]
    RhsMismatch { rows: usize, rhs: usize },

    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveMismatch { expected: usize, found: usize },

    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),

    #[error("simplex did not terminate within {limit} pivots")]
    IterationLimit { limit: usize },
}

pub type Result<T> = std::result::Result<T, LpError>;

/// `A x = b, x ≥ 0` with dense rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFeasibilityProblem {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    variables: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeasibilityOutcome {
    Feasible { point: Vec<f64> },
    Infeasible { certificate: Vec<f64> },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizeOutcome {
    Optimal { point: Vec<f64>, value: f64 },
    Infeasible { certificate: Vec<f64> },
    Unbounded,
}

impl LinearFeasibilityProblem {
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>, variables: usize) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(LpError::RhsMismatch {
                rows: rows.len(),
                rhs: rhs.len(),
            });
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != variables {
                return Err(LpError::RaggedRow {
                    row,
                    expected: variables,
                    found: r.len(),
                });
            }
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("constraint matrix"));
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("right-hand side"));
        }
        Ok(Self { rows, rhs, variables })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    /// Adds `row · x = value`.
    pub fn push(&mut self, row: Vec<f64>, value: f64) -> Result<()> {
        if row.len() != self.variables {
            return Err(LpError::RaggedRow {
                row: self.rows.len(),
                expected: self.variables,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) || !value.is_finite() {
            return Err(LpError::NonFinite("appended constraint"));
        }
        self.rows.push(row);
        self.rhs.push(value);
        Ok(())
    }

    /// `max(|Ax - b|_∞, max_i(-x_i))`; zero for an exact feasible point.
    pub fn point_residual(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.variables, "point length");
        let eq = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| (dot(r, x) - b).abs())
            .fold(0.0, f64::max);
        let neg = x.iter().map(|v| -v).fold(0.0, f64::max);
        eq.max(neg)
    }

    pub fn verify_point(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.variables && x.iter().all(|v| v.is_finite()) && self.point_residual(x) <= tol
    }

    /// `(max_j (yᵀA)_j, yᵀb)` for a candidate certificate.
    pub fn certificate_margins(&self, y: &[f64]) -> (f64, f64) {
        assert_eq!(y.len(), self.rows.len(), "certificate length");
        let mut yta = vec![0.0; self.variables];
        for (yi, r) in y.iter().zip(&self.rows) {
            for (acc, a) in yta.iter_mut().zip(r) {
                *acc += yi * a;
            }
        }
        let worst = yta.into_iter().fold(f64::NEG_INFINITY, f64::max);
        (worst, dot(y, &self.rhs))
    }

    /// `yᵀA ≤ tol` componentwise and `yᵀb > tol`.
    pub fn verify_certificate(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.rows.len() || y.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let (worst, gap) = self.certificate_margins(y);
        worst <= tol && gap > tol
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tableau with the reduced-cost row stored last and the rhs in the last
/// column.
struct Tableau {
    width: usize,
    rows: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == 0.0 {
                continue;
            }
            for (c, pv) in pivot_row.iter().enumerate() {
                self.data[r * w + c] -= f * pv;
            }
            self.data[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Minimizes over columns `< active` with Bland's rule.
    fn run(&mut self, active: usize) -> Result<PhaseEnd> {
        let obj = self.rows;
        let rc = self.rhs_col();
        loop {
            if self.pivots >= MAX_ITERATIONS {
                return Err(LpError::IterationLimit { limit: MAX_ITERATIONS });
            }
            let Some(enter) = (0..active).find(|&c| self.at(obj, c) < -PIVOT_TOL) else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.at(r, rc) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-14 || (ratio <= lratio + 1e-14 && self.basis[r] < self.basis[lr]) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(PhaseEnd::Unbounded),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

fn solve(problem: &LinearFeasibilityProblem, cost: Option<&[f64]>) -> Result<OptimizeOutcome> {
    let m = problem.rows.len();
    let n = problem.variables;
    let width = n + m + 1;
    let mut data = vec![0.0; (m + 1) * width];
    let mut signs = vec![1.0; m];
    for i in 0..m {
        let s = if problem.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        signs[i] = s;
        for j in 0..n {
            data[i * width + j] = s * problem.rows[i][j];
        }
        data[i * width + n + i] = 1.0;
        data[i * width + width - 1] = s * problem.rhs[i];
    }
    // phase-one reduced costs: c = (0, 1) minus the sum of all rows
    for i in 0..m {
        for j in 0..n {
            data[m * width + j] -= data[i * width + j];
        }
        data[m * width + width - 1] -= data[i * width + width - 1];
    }
    let mut t = Tableau {
        width,
        rows: m,
        data,
        basis: (n..n + m).collect(),
        pivots: 0,
    };
    t.run(n + m)?;

    let scale = 1.0 + problem.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let infeasibility = -t.at(m, width - 1);
    if infeasibility > FEASIBILITY_TOL * 1e-2 * scale {
        // reduced cost of artificial i is 1 - y_i
        let mut y: Vec<f64> = (0..m).map(|i| signs[i] * (1.0 - t.at(m, n + i))).collect();
        let norm = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if norm > 0.0 {
            y.iter_mut().for_each(|v| *v /= norm);
        }
        return Ok(OptimizeOutcome::Infeasible { certificate: y });
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut r = 0;
    while r < t.rows {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&c| t.at(r, c).abs() > 1e-9) {
                t.pivot(r, c);
            } else {
                remove_row(&mut t, r);
                continue;
            }
        }
        r += 1;
    }

    let Some(cost) = cost else {
        return Ok(OptimizeOutcome::Optimal {
            point: extract(&t, n),
            value: 0.0,
        });
    };
    // phase two: rebuild the reduced-cost row for the real objective
    let obj = t.rows;
    let row = &mut t.data[obj * t.width..(obj + 1) * t.width];
    row.fill(0.0);
    row[..n].copy_from_slice(&cost[..n]);
    for r in 0..t.rows {
        let cb = cost[t.basis[r]];
        if cb == 0.0 {
            continue;
        }
        for c in 0..t.width {
            t.data[obj * t.width + c] -= cb * t.data[r * t.width + c];
        }
    }
    match t.run(n)? {
        PhaseEnd::Unbounded => Ok(OptimizeOutcome::Unbounded),
        PhaseEnd::Optimal => {
            let point = extract(&t, n);
            let value = dot(cost, &point);
            Ok(OptimizeOutcome::Optimal { point, value })
        }
    }
}

fn remove_row(t: &mut Tableau, r: usize) {
    let w = t.width;
    t.data.drain(r * w..(r + 1) * w);
    t.basis.remove(r);
    t.rows -= 1;
}

fn extract(t: &Tableau, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.at(r, t.rhs_col()).max(0.0);
        }
    }
    x
}

/// Finds `x ≥ 0` with `Ax = b`, or a Farkas certificate that none exists.
pub fn solve_feasibility(problem: &LinearFeasibilityProblem) -> Result<FeasibilityOutcome> {
    Ok(match solve(problem, None)? {
        OptimizeOutcome::Optimal { point, .. } => FeasibilityOutcome::Feasible { point },
        OptimizeOutcome::Infeasible { certificate } => FeasibilityOutcome::Infeasible { certificate },
        OptimizeOutcome::Unbounded => unreachable!("phase one is bounded below by zero"),
    })
}

/// Optimizes `cᵀx` over the feasible set.
pub fn optimize(problem: &LinearFeasibilityProblem, objective: &[f64], sense: Sense) -> Result<OptimizeOutcome> {
    if objective.len() != problem.variables {
        return Err(LpError::ObjectiveMismatch {
            expected: problem.variables,
            found: objective.len(),
        });
    }
    if objective.iter().any(|v| !v.is_finite()) {
        return Err(LpError::NonFinite("objective"));
    }
    let cost: Vec<f64> = match sense {
        Sense::Minimize => objective.to_vec(),
        Sense::Maximize => objective.iter().map(|v| -v).collect(),
    };
    Ok(match solve(problem, Some(&cost))? {
        OptimizeOutcome::Optimal { point, .. } => {
            let value = dot(objective, &point);
            OptimizeOutcome::Optimal { point, value }
        }
        other => other,
    })
}
