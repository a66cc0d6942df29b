//! Construction of the mixed-integer linear program that rewires a network
//! to its minimal (or maximal) direct impact.
//!
//! The objective sum_ij min(L_ij/e_j, 1) * a_j is piecewise linear and
//! concave in each entry. Each entry x_k of the column-major vectorization
//! of L is split into a below-equity part y_{2k} and an above-equity part
//! y_{2k+1} (0-based), with binaries forcing the cheap above-equity part to
//! fill only once the below-equity part is saturated. Constraint blocks:
//!
//!   A1: the four indicator rows per entry, all in `<= 0` form
//!   A2: column sums        = a
//!   A3: row sums           = l
//!   A4: kappa-weighted column sums = r = L^T kappa  (sense `=` or `>=`)
//!
//! Diagonal entries are pinned to zero through variable bounds rather than
//! extra rows.

use crate::matrix::SquareMatrix;
use crate::network::BankingSystem;
use serde::{Deserialize, Serialize};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Sense of the credit-risk rows A4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskSense {
    Equality,
    GreaterEqual,
}

/// Row sense of a constraint block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    LessEqual,
    Equal,
    GreaterEqual,
}

/// Sparse matrix block in triplet storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseBlock {
    pub n_rows: usize,
    pub n_cols: usize,
    /// (row, col, value) triplets; rows need not be sorted.
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseBlock {
    fn new(n_rows: usize, n_cols: usize) -> Self {
        SparseBlock {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    /// Dense rows, mostly for tests and small-instance inspection.
    pub fn row(&self, r: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self
            .entries
            .iter()
            .filter(|(row, _, _)| *row == r)
            .map(|&(_, c, v)| (c, v))
            .collect();
        out.sort_by_key(|&(c, _)| c);
        out
    }

    pub fn multiply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        for &(r, c, v) in &self.entries {
            out[r] += v * z[c];
        }
        out
    }
}

/// The expanded N^2 vectors e_bar, a_bar, l_bar matching the column-major
/// vectorization: position k of x corresponds to entry (row, col) of L with
/// row = k % N, col = k / N, and carries the creditor's equity/assets and
/// the debtor's row sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedVectors {
    pub e_bar: Vec<f64>,
    pub a_bar: Vec<f64>,
    pub l_bar: Vec<f64>,
}

/// The assembled MILP. Variable layout (0-based), with P = N^2:
///
///   z[2k]           y_{2k}   below-equity part of entry k      (k < P)
///   z[2k+1]         y_{2k+1} above-equity part of entry k
///   z[2P + 2k]      binary for y_{2k}
///   z[2P + 2k + 1]  binary for y_{2k+1}
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpProblem {
    pub n_banks: usize,
    /// Objective slopes, length 4 N^2.
    pub c: Vec<f64>,
    /// Indicator rows, sense <=, rhs 0.
    pub a1: SparseBlock,
    /// Column-sum rows, sense =, rhs `rhs_assets`.
    pub a2: SparseBlock,
    /// Row-sum rows, sense =, rhs `rhs_liabilities`.
    pub a3: SparseBlock,
    /// Credit-risk rows, sense `risk_sense`, rhs `rhs_risk`.
    pub a4: SparseBlock,
    pub rhs_assets: Vec<f64>,
    pub rhs_liabilities: Vec<f64>,
    pub rhs_risk: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Integrality flags; true exactly on the trailing 2 N^2 binary slots.
    pub integer: Vec<bool>,
    pub direction: Direction,
    pub risk_sense: RiskSense,
    /// Binaries eliminated by presolve (fixed through bounds).
    pub fixed_binaries: usize,
    /// Feasible starting point (the empirical network's split), if attached.
    pub warm_start: Option<Vec<f64>>,
}

impl MilpProblem {
    pub fn n_vars(&self) -> usize {
        4 * self.n_banks * self.n_banks
    }

    pub fn n_entries(&self) -> usize {
        self.n_banks * self.n_banks
    }

    /// True objective value c^T z.
    pub fn objective_of(&self, z: &[f64]) -> f64 {
        self.c.iter().zip(z).map(|(c, v)| c * v).sum()
    }

    /// Check A1-A4 and bounds at `z` within `tol`; returns the first
    /// violation description, if any. Used by tests and debug assertions.
    pub fn check_feasible(&self, z: &[f64], tol: f64) -> Option<String> {
        for (j, &v) in z.iter().enumerate() {
            if v < self.lower[j] - tol || v > self.upper[j] + tol {
                return Some(format!(
                    "bound violation at var {j}: {v} not in [{}, {}]",
                    self.lower[j], self.upper[j]
                ));
            }
        }
        for (r, lhs) in self.a1.multiply(z).into_iter().enumerate() {
            if lhs > tol {
                return Some(format!("A1 row {r} violated: {lhs} > 0"));
            }
        }
        let scale = |x: f64| x.abs().max(1.0);
        for (r, lhs) in self.a2.multiply(z).into_iter().enumerate() {
            if (lhs - self.rhs_assets[r]).abs() > tol * scale(self.rhs_assets[r]) {
                return Some(format!("A2 row {r}: {lhs} != {}", self.rhs_assets[r]));
            }
        }
        for (r, lhs) in self.a3.multiply(z).into_iter().enumerate() {
            if (lhs - self.rhs_liabilities[r]).abs() > tol * scale(self.rhs_liabilities[r]) {
                return Some(format!("A3 row {r}: {lhs} != {}", self.rhs_liabilities[r]));
            }
        }
        for (r, lhs) in self.a4.multiply(z).into_iter().enumerate() {
            let rhs = self.rhs_risk[r];
            let bad = match self.risk_sense {
                RiskSense::Equality => (lhs - rhs).abs() > tol * scale(rhs),
                RiskSense::GreaterEqual => lhs < rhs - tol * scale(rhs),
            };
            if bad {
                return Some(format!("A4 row {r}: {lhs} vs {rhs}"));
            }
        }
        None
    }
}

/// Column-major vectorization x = vec(L): x[j*N + i] = L[i][j].
pub fn vectorize(l: &SquareMatrix) -> Vec<f64> {
    let n = l.n();
    let mut x = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            x.push(l.get(i, j));
        }
    }
    x
}

/// Inverse of [`vectorize`].
pub fn devectorize(x: &[f64], n: usize) -> SquareMatrix {
    assert_eq!(x.len(), n * n, "vector length must be N^2");
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            l.set(i, j, x[j * n + i]);
        }
    }
    l
}

/// Entry index -> (row, col) of L under column-major stacking.
#[inline]
pub fn entry_position(k: usize, n: usize) -> (usize, usize) {
    (k % n, k / n)
}

/// Expand equities, assets, and row sums to length N^2 along x.
pub fn expand_vectors(system: &BankingSystem) -> ExpandedVectors {
    let n = system.n();
    let agg = system.aggregates();
    let p = n * n;
    let mut e_bar = Vec::with_capacity(p);
    let mut a_bar = Vec::with_capacity(p);
    let mut l_bar = Vec::with_capacity(p);
    for k in 0..p {
        let (row, col) = entry_position(k, n);
        e_bar.push(system.equity()[col]);
        a_bar.push(agg.assets[col]);
        l_bar.push(agg.liabilities[row]);
    }
    ExpandedVectors { e_bar, a_bar, l_bar }
}

/// Upper bound of the above-equity part: u_k = max(0, min(a_bar, l_bar) - e_bar).
pub fn above_equity_bound(ev: &ExpandedVectors, k: usize) -> f64 {
    (ev.a_bar[k].min(ev.l_bar[k]) - ev.e_bar[k]).max(0.0)
}

/// The un-normalized objective sum_ij min(L_ij/e_j, 1) * a_j, evaluated on a
/// candidate matrix against the system's equities and (empirical) column sums.
/// Equals total direct impact times the market volume.
pub fn objective_value(system: &BankingSystem, candidate: &SquareMatrix) -> f64 {
    let n = system.n();
    debug_assert_eq!(candidate.n(), n);
    let assets = system.liabilities().col_sums();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let x = candidate.get(i, j);
            if x > 0.0 {
                total += (x / system.equity()[j]).min(1.0) * assets[j];
            }
        }
    }
    total
}

/// Split a feasible matrix into a MILP-feasible point z:
/// y_below = min(x, e_bar), y_above = max(0, x - e_bar), binaries by positivity.
pub fn feasible_split(system: &BankingSystem, l: &SquareMatrix) -> Vec<f64> {
    let n = system.n();
    debug_assert_eq!(l.n(), n);
    let ev = expand_vectors(system);
    let p = n * n;
    let x = vectorize(l);
    let mut z = vec![0.0; 4 * p];
    for k in 0..p {
        let below = x[k].min(ev.e_bar[k]);
        let above = (x[k] - ev.e_bar[k]).max(0.0);
        z[2 * k] = below;
        z[2 * k + 1] = above;
        z[2 * p + 2 * k] = if below > 0.0 { 1.0 } else { 0.0 };
        z[2 * p + 2 * k + 1] = if above > 0.0 { 1.0 } else { 0.0 };
    }
    z
}

/// Reconstruct the liability matrix from the y part of z (pair sums).
pub fn network_from_z(z: &[f64], n: usize) -> SquareMatrix {
    let p = n * n;
    let mut x = vec![0.0; p];
    for k in 0..p {
        let (i, j) = entry_position(k, n);
        if i != j {
            x[k] = z[2 * k] + z[2 * k + 1];
        }
    }
    devectorize(&x, n)
}

/// Assemble the full MILP for `system`.
pub fn build_problem(
    system: &BankingSystem,
    direction: Direction,
    risk_sense: RiskSense,
) -> MilpProblem {
    let n = system.n();
    let p = n * n;
    let n_vars = 4 * p;
    let ev = expand_vectors(system);
    let agg = system.aggregates();
    let kappa = system.kappa();

    // Objective: slope a_bar/e_bar on the below-equity parts, zero elsewhere.
    let mut c = vec![0.0; n_vars];
    for k in 0..p {
        c[2 * k] = ev.a_bar[k] / ev.e_bar[k];
    }

    // Bounds. Diagonal entries and their binaries are pinned to zero.
    let lower = vec![0.0; n_vars];
    let mut upper = vec![0.0; n_vars];
    let mut integer = vec![false; n_vars];
    for k in 0..p {
        let (i, j) = entry_position(k, n);
        let diag = i == j;
        upper[2 * k] = if diag { 0.0 } else { ev.e_bar[k] };
        upper[2 * k + 1] = if diag { 0.0 } else { above_equity_bound(&ev, k) };
        upper[2 * p + 2 * k] = if diag { 0.0 } else { 1.0 };
        upper[2 * p + 2 * k + 1] = if diag { 0.0 } else { 1.0 };
        integer[2 * p + 2 * k] = true;
        integer[2 * p + 2 * k + 1] = true;
    }

    // A1: four rows per entry, sense <= 0, in the order
    //   y_below - e_bar * d_below        <= 0
    //  -y_below + e_bar * d_above        <= 0
    //   y_above - u * d_above            <= 0
    //  -d_below + d_above                <= 0
    let mut a1 = SparseBlock::new(4 * p, n_vars);
    for k in 0..p {
        let e = ev.e_bar[k];
        let u = above_equity_bound(&ev, k);
        let (y_lo, y_hi) = (2 * k, 2 * k + 1);
        let (d_lo, d_hi) = (2 * p + 2 * k, 2 * p + 2 * k + 1);
        a1.push(4 * k, y_lo, 1.0);
        a1.push(4 * k, d_lo, -e);
        a1.push(4 * k + 1, y_lo, -1.0);
        a1.push(4 * k + 1, d_hi, e);
        a1.push(4 * k + 2, y_hi, 1.0);
        a1.push(4 * k + 2, d_hi, -u);
        a1.push(4 * k + 3, d_lo, -1.0);
        a1.push(4 * k + 3, d_hi, 1.0);
    }

    // A2 (column sums), A3 (row sums), A4 (kappa-weighted column sums);
    // coefficients sit on both members of each y pair, diagonal skipped.
    let mut a2 = SparseBlock::new(n, n_vars);
    let mut a3 = SparseBlock::new(n, n_vars);
    let mut a4 = SparseBlock::new(n, n_vars);
    for k in 0..p {
        let (i, j) = entry_position(k, n);
        if i == j {
            continue;
        }
        for y in [2 * k, 2 * k + 1] {
            a2.push(j, y, 1.0);
            a3.push(i, y, 1.0);
            a4.push(j, y, kappa[i]);
        }
    }

    // r = L^T kappa.
    let rhs_risk: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| system.liabilities().get(i, j) * kappa[i])
                .sum()
        })
        .collect();

    let warm_start = Some(feasible_split(system, system.liabilities()));

    MilpProblem {
        n_banks: n,
        c,
        a1,
        a2,
        a3,
        a4,
        rhs_assets: agg.assets,
        rhs_liabilities: agg.liabilities,
        rhs_risk,
        lower,
        upper,
        integer,
        direction,
        risk_sense,
        fixed_binaries: 0,
        warm_start,
    }
}

/// Fix variables whose values are forced, shrinking the binary search space
/// without changing the feasible set:
///
/// * entries that cannot exceed equity (u = 0): above-equity part and its
///   binary pinned to 0, below-equity binary pinned to 1 (it constrains
///   nothing once the pair is a single segment);
/// * entries forced empty (min(a_bar, l_bar) = 0): both parts and both
///   binaries pinned to 0.
pub fn presolve(problem: &MilpProblem) -> MilpProblem {
    let mut out = problem.clone();
    let n = problem.n_banks;
    let p = n * n;
    // Recover e_bar/u from the original bounds.
    for k in 0..p {
        let (i, j) = entry_position(k, n);
        if i == j {
            continue; // already pinned at build time
        }
        let (y_lo, y_hi) = (2 * k, 2 * k + 1);
        let (d_lo, d_hi) = (2 * p + 2 * k, 2 * p + 2 * k + 1);
        let u = problem.upper[y_hi];
        let cap_is_zero = problem.rhs_assets[j] == 0.0 || problem.rhs_liabilities[i] == 0.0;
        if cap_is_zero {
            out.upper[y_lo] = 0.0;
            out.upper[y_hi] = 0.0;
            out.upper[d_lo] = 0.0;
            out.upper[d_hi] = 0.0;
            out.fixed_binaries += 2;
        } else if u == 0.0 {
            out.upper[y_hi] = 0.0;
            out.upper[d_hi] = 0.0;
            out.lower[d_lo] = 1.0;
            out.fixed_binaries += 2;
        }
    }
    out
}

/// Count of binaries still free after bound fixing.
pub fn free_binaries(problem: &MilpProblem) -> usize {
    (0..problem.n_vars())
        .filter(|&j| problem.integer[j] && problem.lower[j] < problem.upper[j])
        .count()
}
