//! Exhaustive optimization oracle for small instances, independent of the
//! MILP reformulation and of the simplex.
//!
//! The feasible set {L >= 0, zero diagonal, row sums, column sums, risk
//! rows} is a bounded polyhedron. Split each off-diagonal entry's range at
//! the creditor's equity: on every resulting box cell the objective is
//! linear, so both the minimum (concave objective, attained at a vertex)
//! and the maximum (linear per cell, attained at a cell vertex) are attained
//! at basic solutions whose nonbasic entries sit at one of {0, equity, cap}.
//! Enumerating every basis of the equality system against every such
//! nonbasic assignment therefore visits an optimum of both directions
//! exactly. Risk rows in `>=` form are lifted with slack columns whose only
//! nonbasic value is zero.
//!
//! Cost grows combinatorially; instances are refused above N = 4.

use crate::model::RiskSense;
use crate::network::BankingSystem;
use crate::{Error, Result};

/// Exact optimal objective values over the feasible polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBounds {
    pub min: f64,
    pub max: f64,
    /// Feasible basic points inspected.
    pub points: usize,
}

const MAX_BANKS: usize = 4;
const RANK_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-8;

/// Enumerate the optimal minimum and maximum of the direct-impact objective.
pub fn brute_force_oracle(system: &BankingSystem, risk_sense: RiskSense) -> Result<OracleBounds> {
    let n = system.n();
    if n > MAX_BANKS {
        return Err(Error::TooLarge(format!(
            "vertex enumeration is limited to {MAX_BANKS} banks, got {n}"
        )));
    }
    let agg = system.aggregates();
    let kappa = system.kappa();
    let equity = system.equity();

    // Column layout: one column per off-diagonal entry (i, j), then one
    // slack column per risk row when the sense is >=.
    let mut entry_cols: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                entry_cols.push((i, j));
            }
        }
    }
    let n_x = entry_cols.len();
    let n_slack = if risk_sense == RiskSense::GreaterEqual {
        n
    } else {
        0
    };
    let n_cols = n_x + n_slack;

    // Equality rows: column sums, row sums, risk rows (with -1 slack).
    let n_rows = 3 * n;
    let mut mat = vec![vec![0.0; n_cols]; n_rows];
    let mut rhs = vec![0.0; n_rows];
    for (c, &(i, j)) in entry_cols.iter().enumerate() {
        mat[j][c] = 1.0;
        mat[n + i][c] = 1.0;
        mat[2 * n + j][c] = kappa[i];
    }
    for j in 0..n {
        rhs[j] = agg.assets[j];
        rhs[n + j] = agg.liabilities[j];
        rhs[2 * n + j] = (0..n)
            .map(|i| system.liabilities().get(i, j) * kappa[i])
            .sum();
        if n_slack > 0 {
            mat[2 * n + j][n_x + j] = -1.0;
        }
    }

    // Candidate nonbasic values per column and box caps.
    let mut caps = vec![f64::INFINITY; n_cols];
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(n_cols);
    for (c, &(i, j)) in entry_cols.iter().enumerate() {
        let cap = agg.assets[j].min(agg.liabilities[i]);
        caps[c] = cap;
        let mut vals = vec![0.0];
        let e = equity[j];
        if e > 0.0 && e < cap {
            vals.push(e);
        }
        if cap > 0.0 {
            vals.push(cap);
        }
        candidates.push(vals);
    }
    for _ in 0..n_slack {
        candidates.push(vec![0.0]);
    }

    let ind_rows = independent_rows(&mat);
    let r = ind_rows.len();
    let m_ind: Vec<&Vec<f64>> = ind_rows.iter().map(|&i| &mat[i]).collect();
    let b_ind: Vec<f64> = ind_rows.iter().map(|&i| rhs[i]).collect();

    // Per-column objective data: min(x/e_j, 1) * a_j for entry columns.
    let obj_of = |x: &[f64]| -> f64 {
        let mut total = 0.0;
        for (c, &(_, j)) in entry_cols.iter().enumerate() {
            if x[c] > 0.0 {
                total += (x[c] / equity[j]).min(1.0) * agg.assets[j];
            }
        }
        total
    };

    let mut best_min = f64::INFINITY;
    let mut best_max = f64::NEG_INFINITY;
    let mut points = 0usize;

    let mut basis = (0..r.min(n_cols)).collect::<Vec<usize>>();
    if r > n_cols {
        return Err(Error::Numerical(
            "equality system rank exceeds column count".into(),
        ));
    }

    // Iterate over all C(n_cols, r) bases.
    loop {
        if let Some(lu) = factorize(&m_ind, &basis) {
            let nonbasic: Vec<usize> = (0..n_cols).filter(|c| !basis.contains(c)).collect();
            let mut choice = vec![0usize; nonbasic.len()];
            loop {
                // rhs for this nonbasic assignment.
                let mut b = b_ind.clone();
                for (slot, &c) in nonbasic.iter().enumerate() {
                    let v = candidates[c][choice[slot]];
                    if v != 0.0 {
                        for (row, b_row) in b.iter_mut().enumerate() {
                            *b_row -= m_ind[row][c] * v;
                        }
                    }
                }
                let xb = lu.solve(&b);
                let mut x = vec![0.0; n_cols];
                for (slot, &c) in nonbasic.iter().enumerate() {
                    x[c] = candidates[c][choice[slot]];
                }
                for (pos, &c) in basis.iter().enumerate() {
                    x[c] = xb[pos];
                }
                if feasible(&mat, &rhs, &x, &caps, n_x) {
                    let v = obj_of(&x);
                    best_min = best_min.min(v);
                    best_max = best_max.max(v);
                    points += 1;
                }
                // next mixed-radix choice
                let mut slot = 0;
                loop {
                    if slot == nonbasic.len() {
                        break;
                    }
                    choice[slot] += 1;
                    if choice[slot] < candidates[nonbasic[slot]].len() {
                        break;
                    }
                    choice[slot] = 0;
                    slot += 1;
                }
                if slot == nonbasic.len() {
                    break;
                }
            }
        }
        if !next_combination(&mut basis, n_cols) {
            break;
        }
    }

    if points == 0 {
        return Err(Error::Numerical(
            "no feasible basic point found; the system should be feasible".into(),
        ));
    }
    Ok(OracleBounds {
        min: best_min,
        max: best_max,
        points,
    })
}

/// Indices of a maximal linearly independent subset of rows.
fn independent_rows(mat: &[Vec<f64>]) -> Vec<usize> {
    let n_rows = mat.len();
    if n_rows == 0 {
        return Vec::new();
    }
    let n_cols = mat[0].len();
    let mut work: Vec<(usize, Vec<f64>)> =
        mat.iter().enumerate().map(|(i, r)| (i, r.clone())).collect();
    let mut selected = Vec::new();
    let mut pivot_row = 0;
    for col in 0..n_cols {
        if pivot_row >= n_rows {
            break;
        }
        let mut best = pivot_row;
        let mut best_val = work[pivot_row].1[col].abs();
        for r in (pivot_row + 1)..n_rows {
            let v = work[r].1[col].abs();
            if v > best_val {
                best_val = v;
                best = r;
            }
        }
        if best_val < RANK_TOL {
            continue;
        }
        work.swap(pivot_row, best);
        selected.push(work[pivot_row].0);
        let pivot = work[pivot_row].1[col];
        for r in (pivot_row + 1)..n_rows {
            let f = work[r].1[col] / pivot;
            if f != 0.0 {
                for c in col..n_cols {
                    let upper = work[pivot_row].1[c];
                    work[r].1[c] -= f * upper;
                }
            }
        }
        pivot_row += 1;
    }
    selected.sort_unstable();
    selected
}

struct Lu {
    r: usize,
    /// Combined LU factors, row-major.
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut y = vec![0.0; r];
        for i in 0..r {
            let mut acc = b[self.perm[i]];
            for k in 0..i {
                acc -= self.lu[i * r + k] * y[k];
            }
            y[i] = acc;
        }
        for i in (0..r).rev() {
            let mut acc = y[i];
            for k in (i + 1)..r {
                acc -= self.lu[i * r + k] * y[k];
            }
            y[i] = acc / self.lu[i * r + i];
        }
        y
    }
}

/// LU with partial pivoting of the chosen basis columns; None if singular.
fn factorize(m_ind: &[&Vec<f64>], basis: &[usize]) -> Option<Lu> {
    let r = basis.len();
    let mut a = vec![0.0; r * r];
    for (row, m_row) in m_ind.iter().enumerate() {
        for (pos, &c) in basis.iter().enumerate() {
            a[row * r + pos] = m_row[c];
        }
    }
    let mut perm: Vec<usize> = (0..r).collect();
    for k in 0..r {
        let mut piv = k;
        let mut piv_val = a[k * r + k].abs();
        for i in (k + 1)..r {
            let v = a[i * r + k].abs();
            if v > piv_val {
                piv_val = v;
                piv = i;
            }
        }
        if piv_val < 1e-10 {
            return None;
        }
        if piv != k {
            for c in 0..r {
                a.swap(k * r + c, piv * r + c);
            }
            perm.swap(k, piv);
        }
        let d = a[k * r + k];
        for i in (k + 1)..r {
            let f = a[i * r + k] / d;
            a[i * r + k] = f;
            if f != 0.0 {
                for c in (k + 1)..r {
                    let upper = a[k * r + c];
                    a[i * r + c] -= f * upper;
                }
            }
        }
    }
    Some(Lu { r, lu: a, perm })
}

fn feasible(mat: &[Vec<f64>], rhs: &[f64], x: &[f64], caps: &[f64], n_x: usize) -> bool {
    for (c, &v) in x.iter().enumerate() {
        let cap = caps[c];
        let scale = cap.abs().max(1.0);
        if v < -FEAS_TOL * scale {
            return false;
        }
        if c < n_x && v > cap + FEAS_TOL * scale {
            return false;
        }
    }
    for (row, m_row) in mat.iter().enumerate() {
        let lhs: f64 = m_row.iter().zip(x).map(|(a, b)| a * b).sum();
        if (lhs - rhs[row]).abs() > FEAS_TOL * rhs[row].abs().max(1.0) {
            return false;
        }
    }
    true
}

fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let r = indices.len();
    if r == 0 {
        return false;
    }
    let mut i = r;
    while i > 0 {
        i -= 1;
        if indices[i] < n - (r - i) {
            indices[i] += 1;
            for k in (i + 1)..r {
                indices[k] = indices[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;

    fn system(rows: &[&[f64]], equity: &[f64]) -> BankingSystem {
        let l = SquareMatrix::from_nested(rows).unwrap();
        BankingSystem::with_default_ids(equity.to_vec(), l).unwrap()
    }

    #[test]
    fn refuses_large_instances() {
        let sys =
            BankingSystem::with_default_ids(vec![1.0; 5], SquareMatrix::zeros(5)).unwrap();
        assert!(brute_force_oracle(&sys, RiskSense::Equality).is_err());
    }

    #[test]
    fn n2_unique_point() {
        let sys = system(&[&[0.0, 5.0], &[3.0, 0.0]], &[10.0, 10.0]);
        let bounds = brute_force_oracle(&sys, RiskSense::Equality).unwrap();
        // objective of the unique feasible matrix:
        // min(5/10,1)*a_1 + min(3/10,1)*a_0 = 0.5*5 + 0.3*3 = 3.4
        assert!((bounds.min - 3.4).abs() < 1e-9);
        assert!((bounds.max - 3.4).abs() < 1e-9);
    }

    #[test]
    fn ring_family_bounds() {
        // e = 4, l = a = 6: the feasible set is the one-parameter family
        // L(t); objective 18*[min(t/4,1) + min((6-t)/4,1)] with minimum 18
        // at the endpoints and maximum 27 on [2,4].
        let sys = system(
            &[&[0.0, 3.0, 3.0], &[3.0, 0.0, 3.0], &[3.0, 3.0, 0.0]],
            &[4.0; 3],
        );
        let bounds = brute_force_oracle(&sys, RiskSense::Equality).unwrap();
        assert!((bounds.min - 18.0).abs() < 1e-8, "min {}", bounds.min);
        assert!((bounds.max - 27.0).abs() < 1e-8, "max {}", bounds.max);
    }

    #[test]
    fn heterogeneous_kappa_shrinks_feasible_set() {
        let l = SquareMatrix::from_nested(&[
            &[0.0, 3.0, 3.0],
            &[3.0, 0.0, 3.0],
            &[3.0, 3.0, 0.0],
        ])
        .unwrap();
        let sys = BankingSystem::with_kappa(
            vec!["a".into(), "b".into(), "c".into()],
            vec![4.0; 3],
            l,
            vec![1.0, 2.0, 4.0],
        )
        .unwrap();
        let tight = brute_force_oracle(&sys, RiskSense::Equality).unwrap();
        let loose = brute_force_oracle(&sys, RiskSense::GreaterEqual).unwrap();
        // Heterogeneous risk weights pin the family to the observed point.
        let uniform = system(
            &[&[0.0, 3.0, 3.0], &[3.0, 0.0, 3.0], &[3.0, 3.0, 0.0]],
            &[4.0; 3],
        );
        let wide = brute_force_oracle(&uniform, RiskSense::Equality).unwrap();
        assert!(tight.min >= wide.min - 1e-9);
        assert!(tight.max <= wide.max + 1e-9);
        assert!(loose.min <= tight.min + 1e-9);
    }

    #[test]
    fn zero_network() {
        let sys = BankingSystem::with_default_ids(vec![1.0; 3], SquareMatrix::zeros(3)).unwrap();
        let bounds = brute_force_oracle(&sys, RiskSense::Equality).unwrap();
        assert_eq!(bounds.min, 0.0);
        assert_eq!(bounds.max, 0.0);
    }
}
