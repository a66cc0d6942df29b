//! Bounded-variable two-phase primal revised simplex.
//!
//! Solves   min c^T x   s.t.   A x {<=,=,>=} b,   lower <= x <= upper
//!
//! with a dense explicit basis inverse, periodic refactorization, Dantzig
//! pricing with a Bland fallback against cycling, and deterministic
//! index-order tie breaking. Rank-deficient equality systems are tolerated:
//! the logical variable of a redundant row simply stays basic at zero.
//!
//! The basis of a solved instance can be carried to the next solve, which
//! makes re-solves after bound changes (branch-and-bound nodes) cheap.

use crate::model::RowSense;

const PIVOT_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 64;
const STALL_LIMIT: usize = 500;

/// A linear program in computational form. Rows are normalized so that every
/// inequality is `<=`; `>=` rows are stored negated.
#[derive(Debug, Clone)]
pub struct Lp {
    n_cols: usize,
    n_rows: usize,
    /// Structural columns as (row, coefficient) lists.
    cols: Vec<Vec<(usize, f64)>>,
    /// True when the row is an equality (logical fixed at zero).
    row_is_eq: Vec<bool>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
}

impl Lp {
    /// Build from triplets. `senses[r]`/`rhs[r]` describe row r; `>=` rows
    /// are negated on the way in.
    pub fn new(
        n_cols: usize,
        n_rows: usize,
        entries: &[(usize, usize, f64)],
        senses: &[RowSense],
        rhs: &[f64],
        obj: Vec<f64>,
    ) -> Self {
        assert_eq!(senses.len(), n_rows);
        assert_eq!(rhs.len(), n_rows);
        assert_eq!(obj.len(), n_cols);
        let sign: Vec<f64> = senses
            .iter()
            .map(|s| match s {
                RowSense::GreaterEqual => -1.0,
                _ => 1.0,
            })
            .collect();
        let mut cols = vec![Vec::new(); n_cols];
        for &(r, c, v) in entries {
            if v != 0.0 {
                cols[c].push((r, sign[r] * v));
            }
        }
        for col in &mut cols {
            col.sort_by_key(|&(r, _)| r);
        }
        let row_is_eq = senses.iter().map(|s| *s == RowSense::Equal).collect();
        let rhs = rhs.iter().zip(&sign).map(|(b, s)| b * s).collect();
        Lp {
            n_cols,
            n_rows,
            cols,
            row_is_eq,
            rhs,
            obj,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration limit or unrecoverable numerical trouble.
    Numerical,
}

/// Basis snapshot for warm starts.
#[derive(Debug, Clone)]
pub struct Basis {
    basic: Vec<usize>,
    at_upper: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Structural variable values (valid when `status == Optimal`).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub basis: Basis,
    /// Reduced costs of the structural variables at termination; zero for
    /// basic variables. Valid when `status == Optimal`.
    pub reduced_costs: Vec<f64>,
    /// Structural variables that ended basic.
    pub is_basic: Vec<bool>,
    /// Nonbasic structural variables resting at their upper bound.
    pub nonbasic_at_upper: Vec<bool>,
}

/// Tolerances for one solve.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub feasibility_tol: f64,
    pub reduced_cost_tol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-9,
            reduced_cost_tol: 1e-9,
            max_iterations: 200_000,
        }
    }
}

enum ColumnRef<'a> {
    Structural(&'a [(usize, f64)]),
    Logical(usize),
}

enum StepOutcome {
    Moved,
    NoEntering,
    Unbounded,
    IterationLimit,
}

struct Worker<'a> {
    lp: &'a Lp,
    opts: SimplexOptions,
    /// Bounds over structurals then logicals, length n_cols + n_rows.
    lower: Vec<f64>,
    upper: Vec<f64>,
    m: usize,
    nt: usize,
    basic: Vec<usize>,
    /// Var -> basis row, or usize::MAX when nonbasic.
    basis_pos: Vec<usize>,
    at_upper: Vec<bool>,
    /// Dense row-major basis inverse, m x m.
    binv: Vec<f64>,
    /// Values of basic variables by basis row.
    xb: Vec<f64>,
    pivots_since_refactor: usize,
    iterations: usize,
    bland: bool,
    stall: usize,
}

impl<'a> Worker<'a> {
    fn new(lp: &'a Lp, lower: &[f64], upper: &[f64], opts: SimplexOptions) -> Self {
        let m = lp.n_rows;
        let nt = lp.n_cols + m;
        assert_eq!(lower.len(), lp.n_cols);
        assert_eq!(upper.len(), lp.n_cols);
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for r in 0..m {
            lo.push(0.0);
            up.push(if lp.row_is_eq[r] { 0.0 } else { f64::INFINITY });
        }
        for j in 0..lp.n_cols {
            assert!(lo[j].is_finite(), "structural lower bounds must be finite");
        }
        Worker {
            lp,
            opts,
            lower: lo,
            upper: up,
            m,
            nt,
            basic: Vec::new(),
            basis_pos: vec![usize::MAX; nt],
            at_upper: vec![false; nt],
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            pivots_since_refactor: 0,
            iterations: 0,
            bland: false,
            stall: 0,
        }
    }

    fn column(&self, var: usize) -> ColumnRef<'_> {
        if var < self.lp.n_cols {
            ColumnRef::Structural(&self.lp.cols[var])
        } else {
            ColumnRef::Logical(var - self.lp.n_cols)
        }
    }

    fn install_basis(&mut self, warm: Option<&Basis>) {
        let logical_basis: Vec<usize> = (0..self.m).map(|r| self.lp.n_cols + r).collect();
        let (basic, at_upper) = match warm {
            Some(b) if b.basic.len() == self.m && b.at_upper.len() == self.nt => {
                (b.basic.clone(), b.at_upper.clone())
            }
            _ => (logical_basis.clone(), vec![false; self.nt]),
        };
        self.basic = basic;
        self.at_upper = at_upper;
        // A nonbasic variable must rest on a finite bound.
        for v in 0..self.nt {
            if self.at_upper[v] && !self.upper[v].is_finite() {
                self.at_upper[v] = false;
            }
        }
        if self.refactorize().is_err() {
            self.basic = logical_basis;
            for f in self.at_upper.iter_mut() {
                *f = false;
            }
            self.refactorize()
                .expect("identity basis cannot be singular");
        }
    }

    /// Rebuild basis positions, the dense inverse, and basic values.
    fn refactorize(&mut self) -> Result<(), ()> {
        let m = self.m;
        for p in self.basis_pos.iter_mut() {
            *p = usize::MAX;
        }
        for (pos, &var) in self.basic.iter().enumerate() {
            self.basis_pos[var] = pos;
        }

        let mut work = vec![0.0; m * m];
        for (pos, &var) in self.basic.iter().enumerate() {
            match self.column(var) {
                ColumnRef::Structural(entries) => {
                    for &(r, v) in entries {
                        work[r * m + pos] = v;
                    }
                }
                ColumnRef::Logical(r) => {
                    work[r * m + pos] = 1.0;
                }
            }
        }
        // Gauss-Jordan on [work | I] with partial pivoting.
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = work[k * m + k].abs();
            for r in (k + 1)..m {
                let v = work[r * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < PIVOT_TOL {
                return Err(());
            }
            if piv_row != k {
                for c in 0..m {
                    work.swap(k * m + c, piv_row * m + c);
                    inv.swap(k * m + c, piv_row * m + c);
                }
            }
            let p = work[k * m + k];
            for c in 0..m {
                work[k * m + c] /= p;
                inv[k * m + c] /= p;
            }
            for r in 0..m {
                if r == k {
                    continue;
                }
                let f = work[r * m + k];
                if f != 0.0 {
                    for c in 0..m {
                        work[r * m + c] -= f * work[k * m + c];
                        inv[r * m + c] -= f * inv[k * m + c];
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
        self.recompute_basic_values();
        Ok(())
    }

    fn nonbasic_value(&self, var: usize) -> f64 {
        if self.at_upper[var] {
            self.upper[var]
        } else {
            self.lower[var]
        }
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut b = self.lp.rhs.clone();
        for var in 0..self.nt {
            if self.basis_pos[var] != usize::MAX {
                continue;
            }
            let val = self.nonbasic_value(var);
            if val != 0.0 {
                match self.column(var) {
                    ColumnRef::Structural(entries) => {
                        for &(r, v) in entries {
                            b[r] -= v * val;
                        }
                    }
                    ColumnRef::Logical(r) => b[r] -= val,
                }
            }
        }
        for i in 0..m {
            let mut acc = 0.0;
            let row = &self.binv[i * m..(i + 1) * m];
            for (r, &br) in b.iter().enumerate() {
                acc += row[r] * br;
            }
            self.xb[i] = acc;
        }
    }

    /// alpha = B^-1 A_q.
    fn ftran(&self, var: usize, alpha: &mut [f64]) {
        let m = self.m;
        for a in alpha.iter_mut() {
            *a = 0.0;
        }
        match self.column(var) {
            ColumnRef::Structural(entries) => {
                for &(r, v) in entries {
                    for i in 0..m {
                        alpha[i] += v * self.binv[i * m + r];
                    }
                }
            }
            ColumnRef::Logical(r) => {
                for i in 0..m {
                    alpha[i] = self.binv[i * m + r];
                }
            }
        }
    }

    /// y = d^T B^-1 for a per-basis-row cost vector d.
    fn btran(&self, d: &[f64], y: &mut [f64]) {
        let m = self.m;
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for i in 0..m {
            let di = d[i];
            if di != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (r, y_r) in y.iter_mut().enumerate() {
                    *y_r += di * row[r];
                }
            }
        }
    }

    fn reduced_cost(&self, var: usize, cost: f64, y: &[f64]) -> f64 {
        let mut dot = 0.0;
        match self.column(var) {
            ColumnRef::Structural(entries) => {
                for &(r, v) in entries {
                    dot += v * y[r];
                }
            }
            ColumnRef::Logical(r) => dot = y[r],
        }
        cost - dot
    }

    fn total_infeasibility(&self) -> f64 {
        let mut total = 0.0;
        for (pos, &var) in self.basic.iter().enumerate() {
            let v = self.xb[pos];
            total += (self.lower[var] - v).max(0.0) + (v - self.upper[var]).max(0.0);
        }
        total
    }

    /// One simplex step. In phase 1 the costs are the infeasibility signs of
    /// the basic variables and the ratio test lets out-of-bounds variables
    /// run to the bound they violate.
    fn step(&mut self, phase1: bool) -> StepOutcome {
        if self.iterations >= self.opts.max_iterations {
            return StepOutcome::IterationLimit;
        }
        self.iterations += 1;
        let m = self.m;
        let tol = self.opts.reduced_cost_tol;
        let ftol = self.opts.feasibility_tol;

        let cost_of = |w: &Worker, var: usize| -> f64 {
            if phase1 || var >= w.lp.n_cols {
                0.0
            } else {
                w.lp.obj[var]
            }
        };

        // Basic cost vector -> dual prices.
        let mut d = vec![0.0; m];
        for (pos, &var) in self.basic.iter().enumerate() {
            d[pos] = if phase1 {
                let v = self.xb[pos];
                if v < self.lower[var] - ftol {
                    -1.0
                } else if v > self.upper[var] + ftol {
                    1.0
                } else {
                    0.0
                }
            } else {
                cost_of(self, var)
            };
        }
        let mut y = vec![0.0; m];
        self.btran(&d, &mut y);

        // Pricing: Dantzig with index tie-break, or Bland when stalled.
        let mut entering: Option<(usize, f64)> = None;
        for var in 0..self.nt {
            if self.basis_pos[var] != usize::MAX || self.lower[var] == self.upper[var] {
                continue;
            }
            let r = self.reduced_cost(var, cost_of(self, var), &y);
            let eligible = if self.at_upper[var] { r > tol } else { r < -tol };
            if !eligible {
                continue;
            }
            if self.bland {
                entering = Some((var, r));
                break;
            }
            match entering {
                Some((_, best)) if r.abs() <= best.abs() => {}
                _ => entering = Some((var, r)),
            }
        }
        let Some((q, _)) = entering else {
            return StepOutcome::NoEntering;
        };

        let sigma: f64 = if self.at_upper[q] { -1.0 } else { 1.0 };
        let mut alpha = vec![0.0; m];
        self.ftran(q, &mut alpha);

        // Ratio test: first bound hit when q moves by sigma * t, t >= 0.
        // A basic variable blocks only while moving toward a bound; in
        // phase 1 a variable beyond a bound moving away never blocks.
        let mut t_best = f64::INFINITY;
        let mut leave: Option<(usize, bool)> = None; // (basis row, leaves at upper)
        let mut leave_rate = 0.0;
        for i in 0..m {
            let rate = -sigma * alpha[i];
            if rate.abs() < PIVOT_TOL {
                continue;
            }
            let var = self.basic[i];
            let v = self.xb[i];
            let below = v < self.lower[var] - ftol;
            let above = v > self.upper[var] + ftol;
            let (target, to_upper) = if rate > 0.0 {
                if below {
                    (self.lower[var], false)
                } else if above {
                    continue; // moving further above its upper bound
                } else if self.upper[var].is_finite() {
                    (self.upper[var], true)
                } else {
                    continue;
                }
            } else if above {
                (self.upper[var], true)
            } else if below {
                continue; // moving further below its lower bound
            } else {
                (self.lower[var], false)
            };
            let t = ((target - v) / rate).max(0.0);
            let tie = (t - t_best).abs() <= 1e-12;
            let better = t < t_best - 1e-12
                || (tie
                    && (rate.abs() > leave_rate + 1e-12
                        || (rate.abs() > leave_rate - 1e-12
                            && leave.map_or(true, |(row, _)| i < row))));
            if better {
                t_best = t;
                leave = Some((i, to_upper));
                leave_rate = rate.abs();
            }
        }

        // The entering variable's own opposite bound.
        let range = self.upper[q] - self.lower[q];
        if range.is_finite() && range < t_best - 1e-12 {
            for i in 0..m {
                self.xb[i] -= sigma * alpha[i] * range;
            }
            self.at_upper[q] = !self.at_upper[q];
            return StepOutcome::Moved;
        }

        let Some((row, to_upper)) = leave else {
            return StepOutcome::Unbounded;
        };
        let t = t_best;

        // Update basic values, swap basis.
        for i in 0..m {
            self.xb[i] -= sigma * alpha[i] * t;
        }
        let leaving_var = self.basic[row];
        let entering_value = self.nonbasic_value(q) + sigma * t;
        self.basic[row] = q;
        self.basis_pos[q] = row;
        self.basis_pos[leaving_var] = usize::MAX;
        self.at_upper[leaving_var] = to_upper;
        self.xb[row] = entering_value;

        // Rank-one update of the inverse.
        let piv = alpha[row];
        debug_assert!(piv.abs() >= PIVOT_TOL);
        let inv_piv = 1.0 / piv;
        for c in 0..m {
            self.binv[row * m + c] *= inv_piv;
        }
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = alpha[i];
            if f != 0.0 {
                // target row i -= f * pivot row, via a disjoint split.
                let (head, tail) = self.binv.split_at_mut(row.max(i) * m);
                let (pivot_row, target_row) = if i > row {
                    (&head[row * m..row * m + m], &mut tail[..m])
                } else {
                    (&tail[..m], &mut head[i * m..i * m + m])
                };
                for c in 0..m {
                    target_row[c] -= f * pivot_row[c];
                }
            }
        }

        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY && self.refactorize().is_err() {
            self.install_basis(None);
        }
        StepOutcome::Moved
    }

    fn run_phase1(&mut self) -> Result<(), LpStatus> {
        let mut last_infeas = f64::INFINITY;
        self.bland = false;
        self.stall = 0;
        loop {
            let infeas = self.total_infeasibility();
            if infeas <= self.opts.feasibility_tol * (self.m as f64).max(1.0) {
                self.bland = false;
                self.stall = 0;
                return Ok(());
            }
            if infeas < last_infeas - 1e-12 {
                self.stall = 0;
            } else {
                self.stall += 1;
                if self.stall > STALL_LIMIT {
                    self.bland = true;
                }
            }
            last_infeas = infeas;
            match self.step(true) {
                StepOutcome::Moved => {}
                StepOutcome::NoEntering => return Err(LpStatus::Infeasible),
                StepOutcome::Unbounded => return Err(LpStatus::Numerical),
                StepOutcome::IterationLimit => return Err(LpStatus::Numerical),
            }
        }
    }

    fn run_phase2(&mut self) -> LpStatus {
        let mut last_obj = f64::INFINITY;
        self.bland = false;
        self.stall = 0;
        loop {
            let cur = self.objective();
            if cur < last_obj - 1e-12 {
                self.stall = 0;
            } else {
                self.stall += 1;
                if self.stall > STALL_LIMIT {
                    self.bland = true;
                }
            }
            last_obj = cur;
            match self.step(false) {
                StepOutcome::Moved => {
                    // Pivots can drift slightly out of feasibility; repair
                    // right after the periodic refactorization if so.
                    if self.pivots_since_refactor == 0
                        && self.total_infeasibility()
                            > self.opts.feasibility_tol * 10.0 * (self.m as f64).max(1.0)
                        && self.run_phase1().is_err()
                    {
                        return LpStatus::Numerical;
                    }
                }
                StepOutcome::NoEntering => return LpStatus::Optimal,
                StepOutcome::Unbounded => return LpStatus::Unbounded,
                StepOutcome::IterationLimit => return LpStatus::Numerical,
            }
        }
    }

    fn objective(&self) -> f64 {
        (0..self.lp.n_cols)
            .map(|v| self.lp.obj[v] * self.value_of(v))
            .sum()
    }

    fn value_of(&self, var: usize) -> f64 {
        let pos = self.basis_pos[var];
        if pos != usize::MAX {
            self.xb[pos]
        } else {
            self.nonbasic_value(var)
        }
    }

    fn extract(&self, status: LpStatus) -> LpOutcome {
        let x: Vec<f64> = (0..self.lp.n_cols).map(|v| self.value_of(v)).collect();
        // Reduced costs d_j = c_j - y^T A_j against the final duals.
        let mut d = vec![0.0; self.m];
        for (pos, &var) in self.basic.iter().enumerate() {
            d[pos] = if var < self.lp.n_cols {
                self.lp.obj[var]
            } else {
                0.0
            };
        }
        let mut y = vec![0.0; self.m];
        self.btran(&d, &mut y);
        let mut reduced_costs = vec![0.0; self.lp.n_cols];
        let mut is_basic = vec![false; self.lp.n_cols];
        let mut nonbasic_at_upper = vec![false; self.lp.n_cols];
        for var in 0..self.lp.n_cols {
            if self.basis_pos[var] != usize::MAX {
                is_basic[var] = true;
            } else {
                reduced_costs[var] = self.reduced_cost(var, self.lp.obj[var], &y);
                nonbasic_at_upper[var] = self.at_upper[var];
            }
        }
        LpOutcome {
            status,
            objective: self.objective(),
            x,
            iterations: self.iterations,
            basis: Basis {
                basic: self.basic.clone(),
                at_upper: self.at_upper.clone(),
            },
            reduced_costs,
            is_basic,
            nonbasic_at_upper,
        }
    }
}

/// Reusable solver state: keeps the basis and its factorization alive across
/// solves of the same LP under changing bounds. Re-solving after a handful of
/// bound changes then costs a few simplex iterations instead of a cold start.
pub struct Session<'a> {
    worker: Worker<'a>,
    primed: bool,
}

impl<'a> Session<'a> {
    pub fn new(lp: &'a Lp, lower: &[f64], upper: &[f64], opts: SimplexOptions) -> Self {
        Session {
            worker: Worker::new(lp, lower, upper, opts),
            primed: false,
        }
    }

    /// Solve under new bounds, warm-starting from wherever the last solve
    /// left the basis.
    pub fn solve(&mut self, lower: &[f64], upper: &[f64]) -> LpOutcome {
        let w = &mut self.worker;
        let m = w.m;
        w.lower[..lower.len()].copy_from_slice(lower);
        w.upper[..upper.len()].copy_from_slice(upper);
        w.iterations = 0;
        if !self.primed {
            w.install_basis(None);
            self.primed = true;
        } else {
            for v in 0..w.nt {
                if w.at_upper[v] && !w.upper[v].is_finite() {
                    w.at_upper[v] = false;
                }
            }
            w.recompute_basic_values();
        }
        if let Err(status) = w.run_phase1() {
            return w.extract(status);
        }
        let mut status = w.run_phase2();
        if status == LpStatus::Optimal {
            // Cheap drift guard: refresh basic values from the factorization
            // and only refactorize when feasibility actually degraded.
            w.recompute_basic_values();
            if w.total_infeasibility() > w.opts.feasibility_tol * 100.0 * (m as f64).max(1.0) {
                if w.refactorize().is_err() {
                    w.install_basis(None);
                }
                status = match w.run_phase1() {
                    Ok(()) => w.run_phase2(),
                    Err(s) => s,
                };
            }
        }
        w.extract(status)
    }

    /// Drop the current basis; the next solve starts cold.
    pub fn reset(&mut self) {
        self.primed = false;
    }
}

/// Solve the LP, optionally warm-starting from a previous basis.
pub fn solve_lp(
    lp: &Lp,
    lower: &[f64],
    upper: &[f64],
    opts: SimplexOptions,
    warm: Option<&Basis>,
) -> LpOutcome {
    let mut w = Worker::new(lp, lower, upper, opts);
    w.install_basis(warm);
    if let Err(status) = w.run_phase1() {
        return w.extract(status);
    }
    let mut status = w.run_phase2();
    if status == LpStatus::Optimal {
        // Guard against drift: refactorize and confirm feasibility held up.
        if w.refactorize().is_err() {
            w.install_basis(None);
        }
        if w.total_infeasibility() > opts.feasibility_tol * 100.0 * (w.m as f64).max(1.0) {
            status = match w.run_phase1() {
                Ok(()) => w.run_phase2(),
                Err(s) => s,
            };
        }
    }
    w.extract(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tiny_bounded_lp() {
        // min -x - 2y  s.t.  x + y <= 3, x <= 2, y <= 2
        let lp = Lp::new(
            2,
            1,
            &[(0, 0, 1.0), (0, 1, 1.0)],
            &[RowSense::LessEqual],
            &[3.0],
            vec![-1.0, -2.0],
        );
        let out = solve_lp(
            &lp,
            &[0.0, 0.0],
            &[2.0, 2.0],
            SimplexOptions::default(),
            None,
        );
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - (-5.0)).abs() < 1e-9);
        assert!((out.x[0] - 1.0).abs() < 1e-9);
        assert!((out.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn handles_equalities_and_redundant_row() {
        // x + y = 2, 2x + 2y = 4 (redundant), min x
        let lp = Lp::new(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 2.0)],
            &[RowSense::Equal, RowSense::Equal],
            &[2.0, 4.0],
            vec![1.0, 0.0],
        );
        let out = solve_lp(
            &lp,
            &[0.0, 0.0],
            &[5.0, 5.0],
            SimplexOptions::default(),
            None,
        );
        assert_eq!(out.status, LpStatus::Optimal);
        assert!(out.objective.abs() < 1e-9);
        assert!((out.x[0] + out.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        // x = 1 and x = 2 simultaneously.
        let lp = Lp::new(
            1,
            2,
            &[(0, 0, 1.0), (1, 0, 1.0)],
            &[RowSense::Equal, RowSense::Equal],
            &[1.0, 2.0],
            vec![0.0],
        );
        let out = solve_lp(&lp, &[0.0], &[5.0], SimplexOptions::default(), None);
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let lp = Lp::new(
            1,
            1,
            &[(0, 0, -1.0)],
            &[RowSense::LessEqual],
            &[1.0],
            vec![-1.0],
        );
        let out = solve_lp(
            &lp,
            &[0.0],
            &[f64::INFINITY],
            SimplexOptions::default(),
            None,
        );
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn greater_equal_rows_are_normalized() {
        // min x  s.t. x >= 2.5
        let lp = Lp::new(
            1,
            1,
            &[(0, 0, 1.0)],
            &[RowSense::GreaterEqual],
            &[2.5],
            vec![1.0],
        );
        let out = solve_lp(&lp, &[0.0], &[10.0], SimplexOptions::default(), None);
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.x[0] - 2.5).abs() < 1e-9);
    }

    #[test]
    fn warm_start_reaches_same_optimum() {
        let lp = Lp::new(
            2,
            1,
            &[(0, 0, 1.0), (0, 1, 1.0)],
            &[RowSense::LessEqual],
            &[3.0],
            vec![-1.0, -2.0],
        );
        let cold = solve_lp(
            &lp,
            &[0.0, 0.0],
            &[2.0, 2.0],
            SimplexOptions::default(),
            None,
        );
        // Tighten a bound and re-solve from the previous basis.
        let warm = solve_lp(
            &lp,
            &[0.0, 0.0],
            &[2.0, 1.0],
            SimplexOptions::default(),
            Some(&cold.basis),
        );
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.objective - (-4.0)).abs() < 1e-9);
    }

    #[test]
    fn transportation_like_equalities() {
        // Two sources (3, 4), two sinks (5, 2), min cost flow on 4 arcs.
        let entries = vec![
            (0, 0, 1.0),
            (0, 1, 1.0),
            (1, 2, 1.0),
            (1, 3, 1.0),
            (2, 0, 1.0),
            (2, 2, 1.0),
            (3, 1, 1.0),
            (3, 3, 1.0),
        ];
        let lp = Lp::new(
            4,
            4,
            &entries,
            &[
                RowSense::Equal,
                RowSense::Equal,
                RowSense::Equal,
                RowSense::Equal,
            ],
            &[3.0, 4.0, 5.0, 2.0],
            vec![1.0, 3.0, 2.0, 4.0],
        );
        let out = solve_lp(
            &lp,
            &[0.0; 4],
            &[f64::INFINITY; 4],
            SimplexOptions::default(),
            None,
        );
        assert_eq!(out.status, LpStatus::Optimal);
        // x00=3, x12=2, x13=2 -> 3*1 + 2*2 + 2*4 = 15
        assert!((out.objective - 15.0).abs() < 1e-9);
    }

    #[test]
    fn fixed_variables_stay_fixed() {
        // min -x - y, x + y <= 3, y fixed at 1.
        let lp = Lp::new(
            2,
            1,
            &[(0, 0, 1.0), (0, 1, 1.0)],
            &[RowSense::LessEqual],
            &[3.0],
            vec![-1.0, -1.0],
        );
        let out = solve_lp(
            &lp,
            &[0.0, 1.0],
            &[10.0, 1.0],
            SimplexOptions::default(),
            None,
        );
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.x[1] - 1.0).abs() < 1e-12);
        assert!((out.x[0] - 2.0).abs() < 1e-9);
    }
}
