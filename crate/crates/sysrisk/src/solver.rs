//! Branch-and-bound solver for the rewiring MILP.
//!
//! The solver reduces the full problem to a compact LP before working on it:
//! diagonal and forced-empty entries are dropped, and for each remaining
//! entry only the below-equity part, the above-equity part, and the single
//! binary that gates the above-equity part are kept. The companion binary of
//! the below-equity part never constrains anything beyond what bounds
//! already enforce, so it is never branched on; returned solutions carry it
//! at its indicator value.
//!
//! Minimization needs the gating binaries: the relaxation otherwise
//! under-pays for large links by sliding mass into the zero-cost
//! above-equity segment. Maximization of the concave objective needs none of
//! that machinery — the relaxation is exact — so `Direction::Maximize` is
//! solved as a plain LP and the optimal matrix is read off directly.
//!
//! Every node relaxation yields a feasible network (pair sums satisfy all
//! sum constraints), so each node doubles as a primal heuristic; the
//! incumbent is usually excellent long before the bound closes. Node
//! selection is best-bound, branching picks the most fractional binary with
//! ties broken by lowest index, and all tie breaking is by index, which
//! makes repeated solves bit-identical.

use crate::matrix::SquareMatrix;
use crate::model::{entry_position, network_from_z, Direction, MilpProblem, RiskSense, RowSense};
use crate::simplex::{self, Lp, LpStatus, SimplexOptions};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

/// Tolerances and limits for one solve.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop when (incumbent - best bound) / max(1, |incumbent|) falls below this.
    pub gap_tolerance: f64,
    /// A binary counts as integral within this distance of 0/1.
    pub integrality_tolerance: f64,
    /// Constraint satisfaction tolerance for returned solutions.
    pub feasibility_tolerance: f64,
    pub node_limit: Option<u64>,
    pub time_limit_seconds: Option<f64>,
    /// Index-order tie breaking everywhere; repeated solves return
    /// bit-identical results. (The sequential solver is deterministic either
    /// way; the flag is honored for API compatibility.)
    pub deterministic_tie_breaking: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap_tolerance: 1e-6,
            integrality_tolerance: 1e-7,
            feasibility_tolerance: 1e-8,
            node_limit: None,
            time_limit_seconds: None,
            deterministic_tie_breaking: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Search tree exhausted; the objective is globally optimal.
    Optimal,
    /// Stopped once the relative optimality gap fell below `gap_tolerance`.
    GapReached,
    Infeasible,
    /// Node or time limit hit; incumbent and gap are still reported.
    LimitHit,
}

/// Result of a MILP solve.
#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: SolveStatus,
    /// Full variable vector of length 4 N^2 (y pairs then binaries).
    pub z: Vec<f64>,
    /// True objective value c^T z.
    pub objective: f64,
    /// Relative optimality gap at termination.
    pub gap: f64,
    /// Reconstructed liability matrix.
    pub l_star: SquareMatrix,
    pub node_count: u64,
    pub lp_iterations: u64,
    pub wall_time_seconds: f64,
}

/// Result of solving the LP relaxation only.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub feasible: bool,
    /// Full variable vector (binaries possibly fractional); empty if infeasible.
    pub z: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

// ---------------------------------------------------------------------------
// Internal reduction
// ---------------------------------------------------------------------------

struct PairCols {
    /// Entry index in 0..N^2.
    entry: usize,
    y_lo: usize,
    y_hi: Option<usize>,
    delta: Option<usize>,
    e_bar: f64,
}

struct Reduced {
    lp: Lp,
    lower: Vec<f64>,
    upper: Vec<f64>,
    pairs: Vec<PairCols>,
    /// (delta internal column, index into `pairs`), in entry order.
    delta_pairs: Vec<(usize, usize)>,
    /// Per entry: objective slope (0 for dead entries).
    slope: Vec<f64>,
    /// Per entry: equity cap of the below-equity segment.
    e_bar: Vec<f64>,
    n: usize,
}

impl Reduced {
    /// x_k = y_lo + y_hi per entry from an internal LP point.
    fn entry_values(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for pair in &self.pairs {
            let mut v = x[pair.y_lo];
            if let Some(hi) = pair.y_hi {
                v += x[hi];
            }
            out[pair.entry] = v.max(0.0);
        }
        out
    }

    /// True concave objective of an entry vector.
    fn true_objective(&self, entries: &[f64]) -> f64 {
        let mut total = 0.0;
        for pair in &self.pairs {
            let x = entries[pair.entry];
            if x > 0.0 {
                total += self.slope[pair.entry] * x.min(self.e_bar[pair.entry]);
            }
        }
        total
    }
}

fn kappa_from_problem(problem: &MilpProblem) -> Vec<f64> {
    let n = problem.n_banks;
    let mut kappa = vec![1.0; n];
    for &(_, col, v) in &problem.a4.entries {
        if col < 2 * problem.n_entries() {
            let (i, _) = entry_position(col / 2, n);
            kappa[i] = v;
        }
    }
    kappa
}

/// Translate the full MILP into the compact internal LP. `sign` is +1 for
/// minimization, -1 for maximization (the simplex always minimizes).
/// Risk rows that merely duplicate the column sums (uniform kappa) are
/// dropped from the internal LP; they are still verified on extraction.
fn build_reduced(problem: &MilpProblem, sign: f64) -> Reduced {
    let n = problem.n_banks;
    let p = n * n;
    let kappa = kappa_from_problem(problem);
    let uniform_kappa = kappa.iter().all(|&k| k == kappa[0]);

    let mut lower: Vec<f64> = Vec::new();
    let mut upper: Vec<f64> = Vec::new();
    let mut obj: Vec<f64> = Vec::new();
    let mut pairs: Vec<PairCols> = Vec::new();
    let mut delta_pairs: Vec<(usize, usize)> = Vec::new();
    let mut slope = vec![0.0; p];
    let mut e_bar = vec![0.0; p];

    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut senses: Vec<RowSense> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();

    for k in 0..p {
        let (i, j) = entry_position(k, n);
        if i == j {
            continue;
        }
        let cap = problem.rhs_assets[j].min(problem.rhs_liabilities[i]);
        let ylo_ub = problem.upper[2 * k].min(cap);
        let yhi_ub = problem.upper[2 * k + 1];
        if ylo_ub <= 0.0 && yhi_ub <= 0.0 {
            continue;
        }
        let e = problem.upper[2 * k];
        slope[k] = problem.c[2 * k];
        e_bar[k] = e;

        let d_hi = 2 * p + 2 * k + 1;
        let d_fixed_zero = problem.upper[d_hi] < 0.5;
        let d_fixed_one = problem.lower[d_hi] > 0.5;

        let y_lo = lower.len();
        let open_gate = d_fixed_one && yhi_ub > 0.0;
        lower.push(if open_gate { e.min(ylo_ub) } else { 0.0 });
        upper.push(ylo_ub);
        obj.push(sign * problem.c[2 * k]);

        let mut y_hi = None;
        let mut delta = None;
        if yhi_ub > 0.0 && !d_fixed_zero {
            let hi = lower.len();
            lower.push(0.0);
            upper.push(yhi_ub);
            obj.push(0.0);
            y_hi = Some(hi);
            if !d_fixed_one {
                let d = lower.len();
                lower.push(0.0);
                upper.push(1.0);
                obj.push(0.0);
                delta = Some(d);
                delta_pairs.push((d, pairs.len()));
                // -y_lo + e*delta <= 0   (gate open => cheap segment full)
                let r = senses.len();
                entries.push((r, y_lo, -1.0));
                entries.push((r, d, e));
                senses.push(RowSense::LessEqual);
                rhs.push(0.0);
                // y_hi - u*delta <= 0    (gate closed => no overflow)
                let r = senses.len();
                entries.push((r, hi, 1.0));
                entries.push((r, d, -yhi_ub));
                senses.push(RowSense::LessEqual);
                rhs.push(0.0);
            }
        }
        pairs.push(PairCols {
            entry: k,
            y_lo,
            y_hi,
            delta,
            e_bar: e,
        });
    }

    // Column sums, row sums, risk rows (risk rows are kept even when kappa
    // is uniform and they duplicate the column sums; redundant equalities
    // are harmless to the simplex).
    let col_row_base = senses.len();
    for j in 0..n {
        senses.push(RowSense::Equal);
        rhs.push(problem.rhs_assets[j]);
    }
    let row_row_base = senses.len();
    for i in 0..n {
        senses.push(RowSense::Equal);
        rhs.push(problem.rhs_liabilities[i]);
    }
    let risk_row_base = senses.len();
    if !uniform_kappa {
        let risk_sense = match problem.risk_sense {
            RiskSense::Equality => RowSense::Equal,
            RiskSense::GreaterEqual => RowSense::GreaterEqual,
        };
        for j in 0..n {
            senses.push(risk_sense);
            rhs.push(problem.rhs_risk[j]);
        }
    }
    for pair in &pairs {
        let (i, j) = entry_position(pair.entry, n);
        for col in std::iter::once(pair.y_lo).chain(pair.y_hi) {
            entries.push((col_row_base + j, col, 1.0));
            entries.push((row_row_base + i, col, 1.0));
            if !uniform_kappa {
                entries.push((risk_row_base + j, col, kappa[i]));
            }
        }
    }

    let lp = Lp::new(lower.len(), senses.len(), &entries, &senses, &rhs, obj);
    Reduced {
        lp,
        lower,
        upper,
        pairs,
        delta_pairs,
        slope,
        e_bar,
        n,
    }
}

/// Canonical MILP-feasible point for a network vector: fill-order split with
/// indicator binaries, respecting any bound fixings present in `problem`.
fn canonical_z(problem: &MilpProblem, entries: &[f64]) -> Vec<f64> {
    let n = problem.n_banks;
    let p = n * n;
    let mut z = vec![0.0; 4 * p];
    for k in 0..p {
        let (i, j) = entry_position(k, n);
        if i == j {
            continue;
        }
        let e = problem.upper[2 * k];
        let x = entries[k].max(0.0);
        let below = x.min(e);
        let above = (x - e).max(0.0);
        z[2 * k] = below;
        z[2 * k + 1] = above;
        let d_lo = 2 * p + 2 * k;
        let d_hi = 2 * p + 2 * k + 1;
        let ind_lo: f64 = if below > 0.0 { 1.0 } else { 0.0 };
        let ind_hi: f64 = if above > 0.0 { 1.0 } else { 0.0 };
        z[d_lo] = ind_lo.max(problem.lower[d_lo]).min(problem.upper[d_lo]);
        z[d_hi] = ind_hi.max(problem.lower[d_hi]).min(problem.upper[d_hi]);
    }
    z
}

fn direction_sign(direction: Direction) -> f64 {
    match direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    }
}

// ---------------------------------------------------------------------------
// LP relaxation (public operation)
// ---------------------------------------------------------------------------

/// Solve the LP relaxation of the problem (binaries relaxed to [0,1]).
pub fn solve_relaxation(problem: &MilpProblem) -> Result<LpSolution> {
    let sign = direction_sign(problem.direction);
    let reduced = build_reduced(problem, sign);
    let out = simplex::solve_lp(
        &reduced.lp,
        &reduced.lower,
        &reduced.upper,
        SimplexOptions::default(),
        None,
    );
    match out.status {
        LpStatus::Optimal => Ok(LpSolution {
            feasible: true,
            objective: sign * out.objective,
            z: inflate_relaxed(problem, &reduced, &out.x),
            iterations: out.iterations as u64,
        }),
        LpStatus::Infeasible => Ok(LpSolution {
            feasible: false,
            z: Vec::new(),
            objective: f64::NAN,
            iterations: out.iterations as u64,
        }),
        LpStatus::Unbounded => Err(Error::Numerical(
            "relaxation unbounded; the feasible set should always be bounded".into(),
        )),
        LpStatus::Numerical => Err(Error::Numerical("simplex failed on the relaxation".into())),
    }
}

/// Reassemble a full (possibly fractional) z vector from an internal LP point.
fn inflate_relaxed(problem: &MilpProblem, reduced: &Reduced, x: &[f64]) -> Vec<f64> {
    let p = problem.n_entries();
    let mut z = vec![0.0; 4 * p];
    for pair in &reduced.pairs {
        let k = pair.entry;
        let y_lo = x[pair.y_lo].max(0.0);
        let y_hi = pair.y_hi.map_or(0.0, |c| x[c].max(0.0));
        z[2 * k] = y_lo;
        z[2 * k + 1] = y_hi;
        let d_lo = 2 * p + 2 * k;
        let d_hi = 2 * p + 2 * k + 1;
        let delta_hi = match pair.delta {
            Some(c) => x[c].clamp(0.0, 1.0),
            None if y_hi > 0.0 => 1.0,
            None => problem.lower[d_hi],
        };
        let delta_lo = if pair.e_bar > 0.0 {
            (y_lo / pair.e_bar).min(1.0).max(delta_hi)
        } else {
            delta_hi
        };
        z[d_hi] = delta_hi.clamp(problem.lower[d_hi], problem.upper[d_hi]);
        z[d_lo] = delta_lo.clamp(problem.lower[d_lo], problem.upper[d_lo]);
    }
    z
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

struct Node {
    /// Bound inherited from the parent relaxation (internal sign).
    bound: f64,
    /// (delta column, fixed-to-one) for every fixing on the path.
    fixings: Vec<(usize, bool)>,
}

struct NodeKey {
    bound: f64,
    id: u64,
}

impl PartialEq for NodeKey {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for NodeKey {}
impl PartialOrd for NodeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for NodeKey {
    // BinaryHeap pops its maximum; invert so the smallest (bound, id) pops.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Globally solve the MILP by best-bound branch and bound on the binaries.
pub fn solve(problem: &MilpProblem, options: &SolveOptions) -> Result<MilpSolution> {
    let start = Instant::now();
    let sign = direction_sign(problem.direction);
    let reduced = build_reduced(problem, sign);
    let simplex_opts = SimplexOptions {
        feasibility_tol: (options.feasibility_tolerance * 0.1).min(1e-9),
        reduced_cost_tol: 1e-9,
        max_iterations: 400_000,
    };

    let mut lp_iterations: u64 = 0;
    let mut node_count: u64 = 1;

    // Base bounds; reduced-cost fixing tightens these globally.
    let mut base_lower = reduced.lower.clone();
    let mut base_upper = reduced.upper.clone();
    let mut session = simplex::Session::new(&reduced.lp, &base_lower, &base_upper, simplex_opts);

    let root = session.solve(&base_lower, &base_upper);
    lp_iterations += root.iterations as u64;
    match root.status {
        LpStatus::Infeasible => {
            return Ok(MilpSolution {
                status: SolveStatus::Infeasible,
                z: Vec::new(),
                objective: f64::NAN,
                gap: f64::INFINITY,
                l_star: SquareMatrix::zeros(problem.n_banks),
                node_count,
                lp_iterations,
                wall_time_seconds: start.elapsed().as_secs_f64(),
            });
        }
        LpStatus::Optimal => {}
        _ => return Err(Error::Numerical("root relaxation failed".into())),
    }

    // Incumbent candidates: the attached warm-start split, the root
    // reconstruction, and a greedy concentrated allocation.
    let mut incumbent_entries: Option<Vec<f64>> = None;
    let mut incumbent_obj = f64::INFINITY; // internal sign
    let consider = |entries: Vec<f64>,
                    incumbent_obj: &mut f64,
                    incumbent_entries: &mut Option<Vec<f64>>| {
        let value = sign * reduced.true_objective(&entries);
        let threshold = if incumbent_obj.is_finite() {
            *incumbent_obj - 1e-12 * incumbent_obj.abs().max(1.0)
        } else {
            f64::INFINITY
        };
        if value < threshold {
            *incumbent_obj = value;
            *incumbent_entries = Some(entries);
        }
    };
    if let Some(ws) = &problem.warm_start {
        if ws.len() == problem.n_vars() {
            let p = problem.n_entries();
            let entries: Vec<f64> = (0..p).map(|k| ws[2 * k] + ws[2 * k + 1]).collect();
            consider(entries, &mut incumbent_obj, &mut incumbent_entries);
        }
    }
    consider(
        reduced.entry_values(&root.x),
        &mut incumbent_obj,
        &mut incumbent_entries,
    );
    if problem.direction == Direction::Minimize {
        if let Some(entries) = greedy_concentrated(problem) {
            consider(entries, &mut incumbent_obj, &mut incumbent_entries);
        }
    }

    // Maximizing the concave objective: the relaxation is exact and the
    // root reconstruction is already an optimal network.
    let maximize_shortcut = problem.direction == Direction::Maximize;

    let mut best_bound = root.objective;
    let mut status = SolveStatus::Optimal;

    if !maximize_shortcut {
        // Reduced-cost fixing: a nonbasic binary whose reduced cost exceeds
        // the absolute root gap can never flip in an improving solution.
        let abs_gap = (incumbent_obj - root.objective).max(0.0);
        for &(col, pair_idx) in &reduced.delta_pairs {
            if root.is_basic[col] || base_lower[col] >= base_upper[col] {
                continue;
            }
            let d = root.reduced_costs[col];
            let pair = &reduced.pairs[pair_idx];
            if root.nonbasic_at_upper[col] {
                if -d > abs_gap + 1e-9 {
                    base_lower[col] = 1.0;
                    base_lower[pair.y_lo] = pair.e_bar.min(base_upper[pair.y_lo]);
                }
            } else if d > abs_gap + 1e-9 {
                base_upper[col] = 0.0;
                if let Some(hi) = pair.y_hi {
                    base_upper[hi] = 0.0;
                }
            }
        }

        let mut queue: BinaryHeap<NodeKey> = BinaryHeap::new();
        let mut store: HashMap<u64, Node> = HashMap::new();
        let mut next_id: u64 = 0;
        // Smallest bound among subtrees discarded within the gap tolerance.
        let mut discarded_floor = f64::INFINITY;

        match fractional_delta(&reduced, &root.x, options.integrality_tolerance) {
            None => {
                best_bound = incumbent_obj.min(root.objective);
            }
            Some(branch_col) => {
                for fix_one in [false, true] {
                    let id = next_id;
                    next_id += 1;
                    queue.push(NodeKey {
                        bound: root.objective,
                        id,
                    });
                    store.insert(
                        id,
                        Node {
                            bound: root.objective,
                            fixings: vec![(branch_col, fix_one)],
                        },
                    );
                }
            }
        }

        let mut stopped_early = false;
        while let Some(key) = queue.pop() {
            let node = store.remove(&key.id).expect("queue and store in sync");
            best_bound = node.bound.min(discarded_floor);
            let scale = incumbent_obj.abs().max(1.0);
            if incumbent_obj - best_bound <= options.gap_tolerance * scale {
                stopped_early = incumbent_obj - best_bound > 1e-12 * scale;
                break;
            }
            if let Some(limit) = options.node_limit {
                if node_count >= limit {
                    status = SolveStatus::LimitHit;
                    stopped_early = true;
                    break;
                }
            }
            if let Some(limit) = options.time_limit_seconds {
                if start.elapsed().as_secs_f64() > limit {
                    status = SolveStatus::LimitHit;
                    stopped_early = true;
                    break;
                }
            }

            node_count += 1;
            let (lower, upper) = apply_fixings(&reduced, &base_lower, &base_upper, &node.fixings);
            let mut out = session.solve(&lower, &upper);
            lp_iterations += out.iterations as u64;
            if out.status == LpStatus::Numerical {
                session.reset();
                out = session.solve(&lower, &upper);
                lp_iterations += out.iterations as u64;
            }
            match out.status {
                LpStatus::Infeasible => continue,
                LpStatus::Optimal => {}
                _ => return Err(Error::Numerical("node relaxation failed".into())),
            }
            let value = out.objective;
            let prune_slack = (0.5 * options.gap_tolerance * incumbent_obj.abs().max(1.0))
                .max(1e-12 * incumbent_obj.abs().max(1.0));
            if value >= incumbent_obj - prune_slack {
                discarded_floor = discarded_floor.min(value);
                continue;
            }
            consider(
                reduced.entry_values(&out.x),
                &mut incumbent_obj,
                &mut incumbent_entries,
            );
            match fractional_delta(&reduced, &out.x, options.integrality_tolerance) {
                None => continue, // integral leaf; reconstruction captured it
                Some(branch_col) => {
                    for fix_one in [false, true] {
                        let mut fixings = node.fixings.clone();
                        fixings.push((branch_col, fix_one));
                        let id = next_id;
                        next_id += 1;
                        queue.push(NodeKey { bound: value, id });
                        store.insert(
                            id,
                            Node {
                                bound: value,
                                fixings,
                            },
                        );
                    }
                }
            }
        }
        if queue.is_empty() && !stopped_early {
            best_bound = incumbent_obj.min(discarded_floor);
        }
        if status == SolveStatus::Optimal {
            let scale = incumbent_obj.abs().max(1.0);
            status = if incumbent_obj - best_bound <= 1e-12 * scale {
                SolveStatus::Optimal
            } else {
                SolveStatus::GapReached
            };
        }
    }

    let Some(entries) = incumbent_entries else {
        return Err(Error::Numerical("no incumbent produced".into()));
    };
    let objective = sign * incumbent_obj;
    let gap = if maximize_shortcut {
        0.0
    } else {
        ((incumbent_obj - best_bound) / incumbent_obj.abs().max(1.0)).max(0.0)
    };
    let z = canonical_z(problem, &entries);
    let l_star = network_from_z(&z, problem.n_banks);
    verify_solution(problem, &l_star, options.feasibility_tolerance)?;

    Ok(MilpSolution {
        status,
        z,
        objective,
        gap,
        l_star,
        node_count,
        lp_iterations,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Greedy concentrated allocation: repeatedly route the largest possible
/// amount between the banks with the largest remaining row and column sums.
/// Vertices of the transportation polytope found this way concentrate volume
/// on few links, which is where the concave minimum lives; the result seeds
/// the incumbent. Only applies under uniform kappa, where the risk rows are
/// implied by the column sums.
fn greedy_concentrated(problem: &MilpProblem) -> Option<Vec<f64>> {
    let n = problem.n_banks;
    let kappa = kappa_from_problem(problem);
    if !kappa.iter().all(|&k| k == kappa[0]) {
        return None;
    }
    let mut residual_l = problem.rhs_liabilities.clone();
    let mut residual_a = problem.rhs_assets.clone();
    let p = n * n;
    let mut entries = vec![0.0; p];
    let total: f64 = residual_l.iter().sum();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if residual_l[i] <= 0.0 {
                continue;
            }
            for j in 0..n {
                if i == j || residual_a[j] <= 0.0 {
                    continue;
                }
                let alloc = residual_l[i].min(residual_a[j]);
                if best.is_none_or(|(_, _, b)| alloc > b) {
                    best = Some((i, j, alloc));
                }
            }
        }
        let Some((i, j, alloc)) = best else { break };
        if alloc <= 0.0 {
            break;
        }
        entries[j * n + i] += alloc;
        residual_l[i] -= alloc;
        residual_a[j] -= alloc;
    }
    let leftover: f64 = residual_l.iter().map(|v| v.max(0.0)).sum();
    if leftover > 1e-9 * total.max(1.0) {
        return None; // stuck on the diagonal; discard the heuristic
    }
    Some(entries)
}

fn apply_fixings(
    reduced: &Reduced,
    base_lower: &[f64],
    base_upper: &[f64],
    fixings: &[(usize, bool)],
) -> (Vec<f64>, Vec<f64>) {
    let mut lower = base_lower.to_vec();
    let mut upper = base_upper.to_vec();
    for &(delta_col, one) in fixings {
        let &(_, pair_idx) = reduced
            .delta_pairs
            .iter()
            .find(|(c, _)| *c == delta_col)
            .expect("fixing references a known binary");
        let pair = &reduced.pairs[pair_idx];
        if one {
            lower[delta_col] = 1.0;
            // gate open: the cheap segment must be saturated
            lower[pair.y_lo] = pair.e_bar.min(upper[pair.y_lo]);
        } else {
            upper[delta_col] = 0.0;
            if let Some(hi) = pair.y_hi {
                upper[hi] = 0.0;
            }
        }
    }
    (lower, upper)
}

/// Most fractional gating binary, ties broken by lowest entry index.
fn fractional_delta(reduced: &Reduced, x: &[f64], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(col, _) in &reduced.delta_pairs {
        let v = x[col];
        let frac = v.min(1.0 - v);
        if frac <= tol {
            continue;
        }
        match best {
            Some((_, best_frac)) if frac <= best_frac => {}
            _ => best = Some((col, frac)),
        }
    }
    best.map(|(col, _)| col)
}

/// Check row sums, column sums, and risk rows of a solved network.
fn verify_solution(problem: &MilpProblem, l_star: &SquareMatrix, tol: f64) -> Result<()> {
    let n = problem.n_banks;
    let kappa = kappa_from_problem(problem);
    let row_sums = l_star.row_sums();
    let col_sums = l_star.col_sums();
    let scale = |x: f64| x.abs().max(1.0);
    for i in 0..n {
        if (row_sums[i] - problem.rhs_liabilities[i]).abs()
            > tol * scale(problem.rhs_liabilities[i])
        {
            return Err(Error::Numerical(format!(
                "row sum {i} drifted: {} vs {}",
                row_sums[i], problem.rhs_liabilities[i]
            )));
        }
        if (col_sums[i] - problem.rhs_assets[i]).abs() > tol * scale(problem.rhs_assets[i]) {
            return Err(Error::Numerical(format!(
                "column sum {i} drifted: {} vs {}",
                col_sums[i], problem.rhs_assets[i]
            )));
        }
        let risk: f64 = (0..n).map(|s| l_star.get(s, i) * kappa[s]).sum();
        let ok = match problem.risk_sense {
            RiskSense::Equality => {
                (risk - problem.rhs_risk[i]).abs() <= tol * scale(problem.rhs_risk[i])
            }
            RiskSense::GreaterEqual => risk >= problem.rhs_risk[i] - tol * scale(problem.rhs_risk[i]),
        };
        if !ok {
            return Err(Error::Numerical(format!(
                "risk row {i} drifted: {} vs {}",
                risk, problem.rhs_risk[i]
            )));
        }
    }
    Ok(())
}

/// Liability matrix encoded in a solution vector (pair sums, diagonal zero).
pub fn extract_network(z: &[f64], n: usize) -> SquareMatrix {
    network_from_z(z, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_problem, objective_value, presolve};
    use crate::network::BankingSystem;

    fn system(rows: &[&[f64]], equity: &[f64]) -> BankingSystem {
        let l = SquareMatrix::from_nested(rows).unwrap();
        BankingSystem::with_default_ids(equity.to_vec(), l).unwrap()
    }

    fn ring3() -> BankingSystem {
        // One-parameter family L(t), t in [0,6]; here the t = 3 member.
        system(
            &[&[0.0, 3.0, 3.0], &[3.0, 0.0, 3.0], &[3.0, 3.0, 0.0]],
            &[4.0, 4.0, 4.0],
        )
    }

    #[test]
    fn two_bank_unique_point() {
        let sys = system(&[&[0.0, 5.0], &[3.0, 0.0]], &[10.0, 10.0]);
        let problem = presolve(&build_problem(&sys, Direction::Minimize, RiskSense::Equality));
        let sol = solve(&problem, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        for i in 0..2 {
            for j in 0..2 {
                assert!((sol.l_star.get(i, j) - sys.liabilities().get(i, j)).abs() < 1e-9);
            }
        }
        let expected = objective_value(&sys, sys.liabilities());
        assert!((sol.objective - expected).abs() < 1e-9);
    }

    #[test]
    fn ring_family_min_and_max() {
        let sys = ring3();
        let min_sol = solve(
            &presolve(&build_problem(&sys, Direction::Minimize, RiskSense::Equality)),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(
            (min_sol.objective - 18.0).abs() < 1e-8,
            "min objective {}",
            min_sol.objective
        );
        let nonzero: Vec<f64> = min_sol
            .l_star
            .as_slice()
            .iter()
            .copied()
            .filter(|v| *v > 1e-9)
            .collect();
        assert_eq!(nonzero.len(), 3);
        for v in nonzero {
            assert!((v - 6.0).abs() < 1e-8);
        }

        let max_sol = solve(
            &presolve(&build_problem(&sys, Direction::Maximize, RiskSense::Equality)),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(
            (max_sol.objective - 27.0).abs() < 1e-8,
            "max objective {}",
            max_sol.objective
        );
        assert_eq!(max_sol.status, SolveStatus::Optimal);
    }

    #[test]
    fn relaxation_matches_direct_evaluation_when_linear() {
        // Equity dominates everything: the objective is linear and constant
        // across the feasible set, so the relaxation value equals the
        // objective of any feasible network.
        let sys = system(
            &[&[0.0, 2.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 2.0, 0.0]],
            &[100.0; 3],
        );
        let problem = presolve(&build_problem(&sys, Direction::Minimize, RiskSense::Equality));
        let lp = solve_relaxation(&problem).unwrap();
        assert!(lp.feasible);
        let expected = objective_value(&sys, sys.liabilities());
        assert!((lp.objective - expected).abs() < 1e-9);
        let sol = solve(&problem, &SolveOptions::default()).unwrap();
        assert!((sol.objective - expected).abs() < 1e-9);
    }

    #[test]
    fn relaxation_detects_infeasible_rhs() {
        let sys = ring3();
        let mut problem = build_problem(&sys, Direction::Minimize, RiskSense::Equality);
        problem.rhs_liabilities[0] += 1.0; // row sums no longer match column sums
        problem.warm_start = None;
        let lp = solve_relaxation(&problem).unwrap();
        assert!(!lp.feasible);
        let sol = solve(&problem, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn solution_z_is_milp_feasible() {
        let sys = system(
            &[&[0.0, 12.0, 1.0], &[2.0, 0.0, 9.0], &[7.0, 4.0, 0.0]],
            &[3.0, 5.0, 4.0],
        );
        for direction in [Direction::Minimize, Direction::Maximize] {
            let problem = presolve(&build_problem(&sys, direction, RiskSense::Equality));
            let sol = solve(&problem, &SolveOptions::default()).unwrap();
            assert_eq!(problem.check_feasible(&sol.z, 1e-7), None);
            assert!((problem.objective_of(&sol.z) - sol.objective).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_repeat_solves() {
        let sys = system(
            &[&[0.0, 12.0, 1.0], &[2.0, 0.0, 9.0], &[7.0, 4.0, 0.0]],
            &[3.0, 5.0, 4.0],
        );
        let problem = presolve(&build_problem(&sys, Direction::Minimize, RiskSense::Equality));
        let a = solve(&problem, &SolveOptions::default()).unwrap();
        let b = solve(&problem, &SolveOptions::default()).unwrap();
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(a.l_star, b.l_star);
        assert_eq!(a.node_count, b.node_count);
    }

    #[test]
    fn sandwich_on_small_instance() {
        let sys = system(
            &[&[0.0, 8.0, 2.0], &[3.0, 0.0, 6.0], &[5.0, 4.0, 0.0]],
            &[2.5, 3.0, 4.5],
        );
        let emp = objective_value(&sys, sys.liabilities());
        let min_sol = solve(
            &presolve(&build_problem(&sys, Direction::Minimize, RiskSense::Equality)),
            &SolveOptions::default(),
        )
        .unwrap();
        let max_sol = solve(
            &presolve(&build_problem(&sys, Direction::Maximize, RiskSense::Equality)),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(min_sol.objective <= emp + 1e-9);
        assert!(max_sol.objective >= emp - 1e-9);
    }
}
