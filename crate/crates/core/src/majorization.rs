//! Majorization arithmetic and uncertainty bounds for joint measurements.
//!
//! A bound for a set of `M` observables on a `d`-level system is the vector
//! `s` whose partial sums `S_k` cap the `k` largest entries of the direct sum
//! of their outcome distributions, for every state. We take
//! `S_k = max_{|T| = k} λmax(Σ_{Π ∈ T} Π)` over subsets of the pool of all
//! rank-one projectors, which is achievable-sum tight for each `k`, then
//! flatten `s` to non-increasing order.
//!
//! Exhaustive subset enumeration is capped at a pool of 12 projectors. For
//! qubits, `λmax(Σ_T Π) = |T|/2 + |Σ_T n|/2` in terms of Bloch vectors,
//! which gives exact bounds for much larger families: all `k` for coplanar
//! directions, and `k = M` for arbitrary ones.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError};
use crate::quantum::{ProbabilityVector, ProjectiveMeasurement, QuantumError};

pub const MAJORIZATION_TOL: f64 = 1e-9;
pub const MAX_POOL: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajorizationError {
    #[error("totals differ: {left} vs {right}")]
    TotalMismatch { left: f64, right: f64 },

    #[error("observables act on different dimensions ({first} and {other})")]
    MixedDimensions { first: usize, other: usize },

    #[error("projector pool of size {size} exceeds the exhaustive limit {limit}")]
    PoolTooLarge { size: usize, limit: usize },

    #[error("no observables given")]
    EmptyPool,

    #[error("qubit observables required, got dimension {0}")]
    NotQubit(usize),

    #[error("Bloch directions are not coplanar (out-of-plane component {0:.3e})")]
    NotCoplanar(f64),

    #[error("invalid bound: {0}")]
    InvalidBound(String),

    #[error("matrix is not square")]
    NotSquare,

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, MajorizationError>;

/// Descending rearrangement; ties keep their input order.
pub fn sort_descending(v: &ProbabilityVector) -> ProbabilityVector {
    let mut c = v.components().to_vec();
    c.sort_by(|a, b| b.total_cmp(a));
    ProbabilityVector::with_total(c, v.total(), f64::INFINITY).expect("permutation keeps validity")
}

/// Concatenation; totals add.
pub fn direct_sum(vs: &[ProbabilityVector]) -> ProbabilityVector {
    let components: Vec<f64> = vs.iter().flat_map(|v| v.components().iter().copied()).collect();
    let total = vs.iter().map(ProbabilityVector::total).sum();
    ProbabilityVector::with_total(components, total, f64::INFINITY).expect("blocks are valid")
}

/// `[v_1, v_1 + v_2, …]`.
pub fn partial_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Anything that caps the partial sums of a descending vector.
pub trait UpperPartialSums {
    fn total(&self) -> f64;

    /// Number of components.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cap on the sum of the `k` largest components, `1 ≤ k ≤ len`.
    /// `None` leaves that `k` unconstrained.
    fn upper_partial_sum(&self, k: usize) -> Option<f64>;
}

impl UpperPartialSums for ProbabilityVector {
    fn total(&self) -> f64 {
        ProbabilityVector::total(self)
    }

    fn len(&self) -> usize {
        ProbabilityVector::len(self)
    }

    fn upper_partial_sum(&self, k: usize) -> Option<f64> {
        let sorted = sort_descending(self);
        Some(sorted.components()[..k].iter().sum())
    }
}

/// Result of comparing a vector against a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizationCheck {
    pub holds: bool,
    /// The `k` (1-based) with the smallest slack.
    pub worst_k: usize,
    /// `min_k (S_k - A_k)`; negative when violated.
    pub slack: f64,
}

impl MajorizationCheck {
    /// `max(0, -slack)`.
    pub fn violation(&self) -> f64 {
        (-self.slack).max(0.0)
    }
}

/// Is `a ≺ bound`? Partial sums of `a` sorted descending are compared with
/// the bound's caps at every constrained `k`.
pub fn majorizes(a: &ProbabilityVector, bound: &dyn UpperPartialSums, tol: f64) -> Result<MajorizationCheck> {
    let (ta, tb) = (a.total(), bound.total());
    if (ta - tb).abs() > tol * ta.abs().max(tb.abs()).max(1.0) {
        return Err(MajorizationError::TotalMismatch { left: ta, right: tb });
    }
    let lhs = partial_sums(sort_descending(a).components());
    let n = lhs.len().max(bound.len());
    let mut worst = (0, f64::INFINITY);
    for k in 1..=n {
        let cap = if k >= bound.len() {
            Some(tb)
        } else {
            bound.upper_partial_sum(k)
        };
        let Some(cap) = cap else { continue };
        let have = if k >= lhs.len() { ta } else { lhs[k - 1] };
        let slack = cap - have;
        if slack < worst.1 {
            worst = (k, slack);
        }
    }
    Ok(MajorizationCheck {
        holds: worst.1 >= -tol,
        worst_k: worst.0,
        slack: worst.1,
    })
}

/// Replaces `s` by the increments of the least concave majorant of the
/// points `(k, S_k)`, merging adjacent blocks whose averages increase.
/// Every partial sum stays at or above the input's.
pub fn flatten_non_increasing(s: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(s.len());
    for &x in s {
        blocks.push((x, 1));
        while blocks.len() > 1 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s0 / n0 as f64 >= s1 / n1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().expect("at least one block") = (s0 + s1, n0 + n1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(sum, n)| std::iter::repeat_n(sum / n as f64, n))
        .collect()
}

/// Bound vector `s` with partial sums `S_k` and total `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationBound {
    s: Vec<f64>,
    partial: Vec<f64>,
    raw_partial: Vec<f64>,
    observable_count: usize,
}

impl MajorizationBound {
    /// From raw partial sums `S_1 … S_n`; the last must equal
    /// `observable_count`.
    pub fn from_partial_sums(raw_partial: Vec<f64>, observable_count: usize) -> Result<Self> {
        let Some(&last) = raw_partial.last() else {
            return Err(MajorizationError::InvalidBound("no partial sums".into()));
        };
        let m = observable_count as f64;
        if (last - m).abs() > 1e-8 * m.max(1.0) {
            return Err(MajorizationError::InvalidBound(format!("final partial sum {last}, expected {m}")));
        }
        let mut raw_partial = raw_partial;
        *raw_partial.last_mut().expect("non-empty") = m;
        let raw_s: Vec<f64> = std::iter::once(raw_partial[0])
            .chain(raw_partial.windows(2).map(|w| w[1] - w[0]))
            .collect();
        if let Some(bad) = raw_s.iter().find(|&&x| x < -1e-9) {
            return Err(MajorizationError::InvalidBound(format!("partial sums decrease by {}", -bad)));
        }
        let s: Vec<f64> = flatten_non_increasing(&raw_s).into_iter().map(|x| x.max(0.0)).collect();
        let mut partial = partial_sums(&s);
        *partial.last_mut().expect("non-empty") = m;
        Ok(Self {
            s,
            partial,
            raw_partial,
            observable_count,
        })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial
    }

    /// `S_k` before flattening.
    pub fn raw_partial_sums(&self) -> &[f64] {
        &self.raw_partial
    }

    pub fn observable_count(&self) -> usize {
        self.observable_count
    }

    /// `S_k` for `1 ≤ k ≤ len`; `S_0 = 0`.
    pub fn partial_sum(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.partial[k - 1]
        }
    }
}

impl UpperPartialSums for MajorizationBound {
    fn total(&self) -> f64 {
        self.observable_count as f64
    }

    fn len(&self) -> usize {
        self.s.len()
    }

    fn upper_partial_sum(&self, k: usize) -> Option<f64> {
        Some(self.partial[k - 1])
    }
}

/// Caps known only at some `k`; the rest are unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBound {
    len: usize,
    total: f64,
    caps: BTreeMap<usize, f64>,
}

impl SparseBound {
    pub fn new(len: usize, total: f64, caps: BTreeMap<usize, f64>) -> Result<Self> {
        if caps.keys().any(|&k| k == 0 || k > len) {
            return Err(MajorizationError::InvalidBound("cap index outside 1..=len".into()));
        }
        Ok(Self { len, total, caps })
    }

    pub fn caps(&self) -> &BTreeMap<usize, f64> {
        &self.caps
    }
}

impl UpperPartialSums for SparseBound {
    fn total(&self) -> f64 {
        self.total
    }

    fn len(&self) -> usize {
        self.len
    }

    fn upper_partial_sum(&self, k: usize) -> Option<f64> {
        self.caps.get(&k).copied()
    }
}

fn common_dim(observables: &[ProjectiveMeasurement]) -> Result<usize> {
    let first = observables.first().ok_or(MajorizationError::EmptyPool)?.dim();
    if let Some(o) = observables.iter().find(|o| o.dim() != first) {
        return Err(MajorizationError::MixedDimensions {
            first,
            other: o.dim(),
        });
    }
    Ok(first)
}

/// Subset-spectral bound by exhaustive enumeration of the projector pool.
pub fn compute_bound(observables: &[ProjectiveMeasurement]) -> Result<MajorizationBound> {
    let dim = common_dim(observables)?;
    let pool: Vec<&ComplexMatrix> = observables.iter().flat_map(|o| o.projectors()).collect();
    if pool.len() > MAX_POOL {
        return Err(MajorizationError::PoolTooLarge {
            size: pool.len(),
            limit: MAX_POOL,
        });
    }
    let n = pool.len();
    let mut best = vec![f64::NEG_INFINITY; n + 1];
    for mask in 1u32..(1 << n) {
        let sum = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .fold(ComplexMatrix::zeros(dim), |acc, i| &acc + pool[i]);
        let lmax = linalg::max_eigenvalue(&sum, 1e-9)?;
        let k = mask.count_ones() as usize;
        best[k] = best[k].max(lmax);
    }
    MajorizationBound::from_partial_sums(best[1..].to_vec(), observables.len())
}

/// `+1` Bloch directions of qubit observables.
pub fn bloch_directions(observables: &[ProjectiveMeasurement]) -> Result<Vec<[f64; 3]>> {
    let dim = common_dim(observables)?;
    if dim != 2 {
        return Err(MajorizationError::NotQubit(dim));
    }
    Ok(observables
        .iter()
        .map(|o| o.bloch_vector(0).expect("qubit"))
        .collect())
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn axpy3(acc: &mut [f64; 3], s: f64, v: [f64; 3]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += s * x;
    }
}

/// `S_{2M-j} = M - j + S_j`, valid for qubits where the minimum eigenvalue
/// of a subset sum mirrors the maximum.
fn qubit_partials_from_lower_half(lower: &[f64], m: usize) -> Vec<f64> {
    let mut partial = vec![0.0; 2 * m];
    partial[..m].copy_from_slice(&lower[..m]);
    for j in 0..m {
        let s_j = if j == 0 { 0.0 } else { lower[j - 1] };
        partial[2 * m - j - 1] = (m - j) as f64 + s_j;
    }
    partial
}

/// Angles in `[0, π)` of coplanar axes, measured in the common plane.
fn planar_angles(dirs: &[[f64; 3]]) -> Result<Vec<f64>> {
    let a = dirs[0];
    let mut normal = [0.0, 0.0, 0.0];
    for d in dirs {
        let c = cross3(a, *d);
        if norm3(c) > norm3(normal) {
            normal = c;
        }
    }
    let nn = norm3(normal);
    if nn < 1e-12 {
        // all parallel: any plane through them works
        return Ok(vec![0.0; dirs.len()]);
    }
    normal.iter_mut().for_each(|x| *x /= nn);
    let off = dirs.iter().map(|d| dot3(*d, normal).abs()).fold(0.0, f64::max);
    if off > 1e-9 {
        return Err(MajorizationError::NotCoplanar(off));
    }
    let e1 = a;
    let e2 = cross3(normal, e1);
    Ok(dirs
        .iter()
        .map(|d| dot3(*d, e2).atan2(dot3(*d, e1)).rem_euclid(PI))
        .collect())
}

/// Exact bound for coplanar qubit observables, all `k`.
///
/// For `k ≤ M` the best subset takes one projector from each of the `k`
/// axes angularly closest to some direction, so it is a contiguous window
/// of the axes sorted by angle modulo `π`. Costs `O(M²)`.
pub fn planar_qubit_bound(observables: &[ProjectiveMeasurement]) -> Result<MajorizationBound> {
    let dirs = bloch_directions(observables)?;
    let m = dirs.len();
    let angles = planar_angles(&dirs)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
    // unrolled twice around: the second lap uses the antipodal projector
    let lap: Vec<[f64; 2]> = (0..2 * m)
        .map(|t| {
            let th = angles[order[t % m]] + if t >= m { PI } else { 0.0 };
            [th.cos(), th.sin()]
        })
        .collect();
    let mut lower = Vec::with_capacity(m);
    for k in 1..=m {
        let mut sum = [0.0, 0.0];
        for v in &lap[..k] {
            sum[0] += v[0];
            sum[1] += v[1];
        }
        let mut best = sum[0].hypot(sum[1]);
        for s in 1..m {
            sum[0] += lap[s + k - 1][0] - lap[s - 1][0];
            sum[1] += lap[s + k - 1][1] - lap[s - 1][1];
            best = best.max(sum[0].hypot(sum[1]));
        }
        lower.push(0.5 * (k as f64 + best));
    }
    MajorizationBound::from_partial_sums(qubit_partials_from_lower_half(&lower, m), m)
}

/// `max_ε |Σ ε_i n_i|` over sign patterns, exact.
///
/// The maximizing patterns are the cells of the arrangement of great circles
/// `n_i · u = 0`. Every cell borders some circle, so sweeping each circle
/// through its crossings with the others, flipping one sign per crossing,
/// visits all of them. Spurious patterns at degenerate crossings are still
/// sign patterns and cannot exceed the maximum. Costs `O(M² log M)`.
pub fn max_signed_sum(dirs: &[[f64; 3]]) -> f64 {
    let m = dirs.len();
    if m == 1 {
        return norm3(dirs[0]);
    }
    let mut best: f64 = 0.0;
    let mut crossings: Vec<(f64, usize)> = Vec::with_capacity(m);
    let mut signs = vec![0.0; m];
    for (i, &ni) in dirs.iter().enumerate() {
        let ni = {
            let n = norm3(ni);
            [ni[0] / n, ni[1] / n, ni[2] / n]
        };
        let helper = if ni[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = {
            let c = cross3(ni, helper);
            let n = norm3(c);
            [c[0] / n, c[1] / n, c[2] / n]
        };
        let e2 = cross3(ni, e1);
        crossings.clear();
        for (j, &nj) in dirs.iter().enumerate() {
            if j == i {
                continue;
            }
            let (a, b) = (dot3(nj, e1), dot3(nj, e2));
            if a.hypot(b) < 1e-15 {
                // parallel to n_i: its sign is free along the whole circle
                continue;
            }
            crossings.push(((-a).atan2(b).rem_euclid(PI), j));
        }
        crossings.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
        let start = match (crossings.first(), crossings.last()) {
            (Some(&(first, _)), Some(&(last, _))) => 0.5 * (last - PI + first),
            _ => 0.0,
        };
        let u = {
            let (c, s) = (start.cos(), start.sin());
            [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]]
        };
        let mut v = [0.0; 3];
        let mut parallel = 0.0;
        for (j, &nj) in dirs.iter().enumerate() {
            if j == i {
                continue;
            }
            let (a, b) = (dot3(nj, e1), dot3(nj, e2));
            if a.hypot(b) < 1e-15 {
                parallel += norm3(nj);
                signs[j] = 0.0;
                continue;
            }
            signs[j] = if dot3(nj, u) >= 0.0 { 1.0 } else { -1.0 };
            axpy3(&mut v, signs[j], nj);
        }
        let own = norm3(dirs[i]) + parallel;
        let mut record = |v: &[f64; 3]| {
            let along = dot3(*v, ni);
            let perp2 = (dot3(*v, *v) - along * along).max(0.0);
            let cand = (perp2 + (along.abs() + own).powi(2)).sqrt();
            best = best.max(cand);
        };
        record(&v);
        for &(_, j) in &crossings {
            axpy3(&mut v, -2.0 * signs[j], dirs[j]);
            signs[j] = -signs[j];
            record(&v);
        }
    }
    best
}

/// Exact caps at `k ∈ {1, M, 2M-1, 2M}` for arbitrary qubit directions.
pub fn qubit_sparse_bound(observables: &[ProjectiveMeasurement]) -> Result<SparseBound> {
    let dirs = bloch_directions(observables)?;
    let m = dirs.len();
    let s_m = 0.5 * (m as f64 + max_signed_sum(&dirs));
    let mut caps = BTreeMap::new();
    caps.insert(1, 1.0);
    caps.insert(m, s_m);
    caps.insert(2 * m - 1, m as f64);
    caps.insert(2 * m, m as f64);
    SparseBound::new(2 * m, m as f64, caps)
}

/// Square non-negative matrix with unit row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochasticMatrix {
    n: usize,
    data: Vec<f64>,
}

pub fn is_doubly_stochastic(rows: &[Vec<f64>], tol: f64) -> bool {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return false;
    }
    let entries_ok = rows.iter().flatten().all(|&x| x.is_finite() && x >= -tol);
    let rows_ok = rows.iter().all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= tol);
    let cols_ok = (0..n).all(|j| (rows.iter().map(|r| r[j]).sum::<f64>() - 1.0).abs() <= tol);
    entries_ok && rows_ok && cols_ok
}

impl DoublyStochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MajorizationError::NotSquare);
        }
        if !is_doubly_stochastic(&rows, tol) {
            return Err(MajorizationError::InvalidBound("matrix is not doubly stochastic".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            data: (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            data: vec![1.0 / n as f64; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(MajorizationError::NotSquare);
        }
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Self { n, data })
    }

    /// `[[D/2, D/2], [D/2, D/2]]`.
    pub fn doubled_average(&self) -> Self {
        let n = self.n;
        let big = 2 * n;
        let data = (0..big * big)
            .map(|k| 0.5 * self.get((k / big) % n, (k % big) % n))
            .collect();
        Self { n: big, data }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn pv(c: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(c.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn sorting() {
        assert_eq!(sort_descending(&pv(&[0.2, 0.5, 0.3])).components(), &[0.5, 0.3, 0.2]);
        assert_eq!(sort_descending(&pv(&[0.5, 0.3, 0.2])).components(), &[0.5, 0.3, 0.2]);
        assert_eq!(sort_descending(&pv(&[0.25; 4])).components(), &[0.25; 4]);
    }

    #[test]
    fn direct_sums() {
        let d = direct_sum(&[pv(&[1.0, 0.0]), pv(&[1.0, 0.0])]);
        assert_eq!(d.components(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.total(), 2.0);
        assert!(direct_sum(&[]).is_empty());
        let eta = 1.0 / 3f64.sqrt();
        let block = pv(&[(1.0 + eta) / 2.0, (1.0 - eta) / 2.0]);
        let d = direct_sum(&[block.clone(), block.clone(), block]);
        assert_eq!(d.len(), 6);
        assert!((d.total() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_pair_bound() {
        let b = compute_bound(&[ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()]).unwrap();
        let r = 2f64.sqrt() / 2.0;
        close(b.s(), &[1.0, r, 1.0 - r, 0.0], 1e-9);
    }

    #[test]
    fn single_observable_bound() {
        let b = compute_bound(&[ProjectiveMeasurement::pauli_z()]).unwrap();
        close(b.s(), &[1.0, 0.0], 1e-12);
        let b = compute_bound(&[ProjectiveMeasurement::computational(3)]).unwrap();
        close(b.s(), &[1.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn majorization_examples() {
        let a = pv(&[0.4, 0.1, 0.3, 0.2]);
        let c = majorizes(&a, &a, MAJORIZATION_TOL).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-15);

        let b = compute_bound(&[ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()]).unwrap();
        let c = majorizes(&pv(&[1.0, 0.0, 1.0, 0.0]), &b, MAJORIZATION_TOL).unwrap();
        assert!(!c.holds);
        assert_eq!(c.worst_k, 2);
        assert!((c.violation() - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-9);

        assert!(majorizes(&pv(&[0.5; 4]), &b, MAJORIZATION_TOL).unwrap().holds);
        assert!(matches!(
            majorizes(&pv(&[0.5; 2]), &b, MAJORIZATION_TOL),
            Err(MajorizationError::TotalMismatch { .. })
        ));
    }

    #[test]
    fn flattening_is_least_concave_majorant() {
        close(&flatten_non_increasing(&[1.0, 0.2, 0.6, 0.2]), &[1.0, 0.4, 0.4, 0.2], 1e-15);
        close(&flatten_non_increasing(&[0.0, 1.0]), &[0.5, 0.5], 1e-15);
        close(&flatten_non_increasing(&[3.0, 2.0, 1.0]), &[3.0, 2.0, 1.0], 1e-15);
    }

    #[test]
    fn planar_route_matches_exhaustive() {
        for n in 2..=6 {
            let family: Vec<_> = (0..n)
                .map(|i| {
                    let th = PI * i as f64 / n as f64 + 0.3;
                    ProjectiveMeasurement::bloch([th.cos(), th.sin(), 0.0]).unwrap()
                })
                .collect();
            let exact = compute_bound(&family).unwrap();
            let planar = planar_qubit_bound(&family).unwrap();
            close(planar.raw_partial_sums(), exact.raw_partial_sums(), 1e-9);
        }
    }

    #[test]
    fn signed_sum_route_matches_exhaustive() {
        let mut family = families::mub_family(2).unwrap();
        family.push(ProjectiveMeasurement::bloch([0.48, -0.6, 0.64]).unwrap());
        family.push(ProjectiveMeasurement::bloch([-0.6, 0.0, 0.8]).unwrap());
        let exact = compute_bound(&family).unwrap();
        let sparse = qubit_sparse_bound(&family).unwrap();
        let m = family.len();
        assert!((sparse.upper_partial_sum(m).unwrap() - exact.raw_partial_sums()[m - 1]).abs() < 1e-9);
    }

    #[test]
    fn doubly_stochastic() {
        assert!(is_doubly_stochastic(&DoublyStochasticMatrix::identity(3).rows(), 1e-12));
        assert!(is_doubly_stochastic(&DoublyStochasticMatrix::uniform(4).rows(), 1e-12));
        let d = DoublyStochasticMatrix::new(vec![vec![0.7, 0.3], vec![0.3, 0.7]], 1e-12).unwrap();
        assert!(is_doubly_stochastic(&d.doubled_average().rows(), 1e-12));
        assert!(!is_doubly_stochastic(&[vec![0.7, 0.4], vec![0.3, 0.6]], 1e-12));
        assert!(!is_doubly_stochastic(&[vec![1.5, -0.5], vec![-0.5, 1.5]], 1e-12));
    }

    #[test]
    fn pool_limits_and_dimension_checks() {
        let big: Vec<_> = (0..7)
            .map(|i| {
                let th = PI * i as f64 / 7.0;
                ProjectiveMeasurement::bloch([th.cos(), th.sin(), 0.0]).unwrap()
            })
            .collect();
        assert!(matches!(
            compute_bound(&big),
            Err(MajorizationError::PoolTooLarge { size: 14, limit: 12 })
        ));
        let mixed = [ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::computational(3)];
        assert!(matches!(compute_bound(&mixed), Err(MajorizationError::MixedDimensions { .. })));
        assert!(matches!(compute_bound(&[]), Err(MajorizationError::EmptyPool)));
    }
}
