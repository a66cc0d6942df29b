//! DebtRank, DebtRank2, and direct-impact systemic risk measures.
//!
//! DebtRank propagates the default of a single seed bank through the impact
//! matrix; every node transmits distress exactly once and then goes inactive,
//! so the iteration terminates after at most N+1 steps. DebtRank2 replaces the
//! single-transmission rule with differential shock propagation: a node
//! forwards every *increment* of its distress level, which on cyclic networks
//! lets shocks circulate until they fall below a convergence threshold.

#[cfg(test)]
use crate::matrix::SquareMatrix;
use crate::network::{BankingSystem, DerivedAggregates, ImpactMatrix};
use serde::{Deserialize, Serialize};

/// Node state in the DebtRank iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeState {
    Undistressed,
    Distressed,
    Inactive,
}

/// Distress trajectory of a single-seed DebtRank run.
#[derive(Debug, Clone)]
pub struct DebtRankState {
    /// Distress levels h_i in [0,1], monotone non-decreasing over iterations.
    pub h: Vec<f64>,
    /// Node states after the final iteration.
    pub s: Vec<NodeState>,
    /// Number of iterations performed (the step at which no node is distressed).
    pub t: usize,
}

/// Iteration cap and convergence threshold for DebtRank2.
#[derive(Debug, Clone, Copy)]
pub struct DebtRank2Options {
    /// Stop once the largest per-step increment falls below this value.
    pub epsilon: f64,
    /// Hard cap on iterations; hitting it flags the result as unconverged.
    pub max_iterations: usize,
}

impl Default for DebtRank2Options {
    fn default() -> Self {
        DebtRank2Options {
            epsilon: 1e-6,
            max_iterations: 10_000,
        }
    }
}

/// Per-bank systemic risk measures of one network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskReport {
    /// Per-bank DebtRank R_i.
    pub debtrank: Vec<f64>,
    /// Total DebtRank R = sum of R_i.
    pub debtrank_total: f64,
    /// Per-bank DebtRank2.
    pub debtrank2: Vec<f64>,
    /// Total DebtRank2.
    pub debtrank2_total: f64,
    /// True when every DebtRank2 seed run converged below epsilon.
    pub debtrank2_converged: bool,
    /// Per-bank direct impact I_i.
    pub direct_impact: Vec<f64>,
    /// Total direct impact I.
    pub direct_impact_total: f64,
    /// Pearson correlation of R_i and I_i across banks (None if degenerate).
    pub pearson_r_i: Option<f64>,
}

/// DebtRank of a single seed bank, returning the full trajectory.
///
/// `w` and `agg` must come from `system`; they are passed in so that
/// all-seeds sweeps compute them once.
pub fn debtrank_single_with_state(
    system: &BankingSystem,
    w: &ImpactMatrix,
    agg: &DerivedAggregates,
    seed: usize,
) -> (f64, DebtRankState) {
    let n = system.n();
    assert!(seed < n, "seed {seed} out of range for {n} banks");
    let w = &w.0;

    let mut h = vec![0.0; n];
    let mut s = vec![NodeState::Undistressed; n];
    h[seed] = 1.0;
    s[seed] = NodeState::Distressed;
    let mut t = 1;

    loop {
        let distressed: Vec<usize> = (0..n)
            .filter(|&j| s[j] == NodeState::Distressed)
            .collect();
        if distressed.is_empty() {
            break;
        }
        t += 1;
        // h first, simultaneously for all nodes, from the previous h.
        let mut h_next = h.clone();
        for i in 0..n {
            let mut incoming = 0.0;
            for &j in &distressed {
                incoming += w.get(j, i) * h[j];
            }
            if incoming > 0.0 {
                h_next[i] = (h[i] + incoming).min(1.0);
            }
        }
        // then s: distressed nodes go inactive, newly hit undistressed nodes
        // become distressed.
        let mut s_next = s.clone();
        for i in 0..n {
            s_next[i] = match s[i] {
                NodeState::Distressed => NodeState::Inactive,
                NodeState::Undistressed if h_next[i] > 0.0 => NodeState::Distressed,
                other => other,
            };
        }
        h = h_next;
        s = s_next;
    }

    let r = (0..n)
        .filter(|&j| j != seed)
        .map(|j| h[j] * agg.weights[j])
        .sum();
    (r, DebtRankState { h, s, t })
}

/// DebtRank R_i of bank `seed`.
pub fn debtrank_single(
    system: &BankingSystem,
    w: &ImpactMatrix,
    agg: &DerivedAggregates,
    seed: usize,
) -> f64 {
    debtrank_single_with_state(system, w, agg, seed).0
}

/// DebtRank of every bank plus the market total R.
pub fn debtrank_all(system: &BankingSystem) -> (Vec<f64>, f64) {
    let w = system.impact_matrix();
    let agg = system.aggregates();
    let r: Vec<f64> = (0..system.n())
        .map(|seed| debtrank_single(system, &w, &agg, seed))
        .collect();
    let total = r.iter().sum();
    (r, total)
}

/// DebtRank2 of bank `seed`; the `bool` is false when the iteration cap was
/// hit before the increments fell below epsilon.
pub fn debtrank2_single(
    system: &BankingSystem,
    w: &ImpactMatrix,
    agg: &DerivedAggregates,
    seed: usize,
    options: DebtRank2Options,
) -> (f64, bool) {
    let n = system.n();
    assert!(seed < n, "seed {seed} out of range for {n} banks");
    assert!(options.epsilon > 0.0, "epsilon must be positive");
    let w = &w.0;

    // h(0) = 0, h(1) = indicator(seed); propagate increments h(t) - h(t-1).
    let mut h_prev = vec![0.0; n];
    let mut h = vec![0.0; n];
    h[seed] = 1.0;
    let mut converged = false;

    for _ in 0..options.max_iterations {
        let mut h_next = h.clone();
        let mut max_increment: f64 = 0.0;
        for i in 0..n {
            let mut incoming = 0.0;
            for j in 0..n {
                let delta = h[j] - h_prev[j];
                if delta > 0.0 {
                    incoming += w.get(j, i) * delta;
                }
            }
            if incoming > 0.0 {
                h_next[i] = (h[i] + incoming).min(1.0);
            }
            max_increment = max_increment.max(h_next[i] - h[i]);
        }
        h_prev = h;
        h = h_next;
        if max_increment < options.epsilon {
            converged = true;
            break;
        }
    }

    let r2 = (0..n)
        .filter(|&j| j != seed)
        .map(|j| h[j] * agg.weights[j])
        .sum();
    (r2, converged)
}

/// DebtRank2 of every bank; the `bool` is true iff all seed runs converged.
pub fn debtrank2_all(system: &BankingSystem, options: DebtRank2Options) -> (Vec<f64>, f64, bool) {
    let w = system.impact_matrix();
    let agg = system.aggregates();
    let mut all_converged = true;
    let r2: Vec<f64> = (0..system.n())
        .map(|seed| {
            let (value, converged) = debtrank2_single(system, &w, &agg, seed, options);
            all_converged &= converged;
            value
        })
        .collect();
    let total = r2.iter().sum();
    (r2, total, all_converged)
}

/// Direct impact I_i = (1/L_bar) * sum_j min(L_ij/e_j, 1) * a_j and the total I.
///
/// The first-order approximation of DebtRank; also the (normalized)
/// objective of the rewiring optimization.
pub fn direct_impact(system: &BankingSystem) -> (Vec<f64>, f64) {
    let n = system.n();
    let agg = system.aggregates();
    if agg.total_volume <= 0.0 {
        return (vec![0.0; n], 0.0);
    }
    let w = system.impact_matrix();
    let impact: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| w.0.get(i, j) * agg.assets[j])
                .sum::<f64>()
                / agg.total_volume
        })
        .collect();
    let total = impact.iter().sum();
    (impact, total)
}

/// Pearson correlation of two equally long samples; None when either sample
/// has zero variance or fewer than two points.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx <= 0.0 || vy <= 0.0 {
        return None;
    }
    Some((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// All risk measures of one network in a single report.
pub fn risk_report(system: &BankingSystem, dr2_options: DebtRank2Options) -> RiskReport {
    let (debtrank, debtrank_total) = debtrank_all(system);
    let (debtrank2, debtrank2_total, debtrank2_converged) = debtrank2_all(system, dr2_options);
    let (direct, direct_impact_total) = direct_impact(system);
    let pearson_r_i = pearson(&debtrank, &direct);
    RiskReport {
        debtrank,
        debtrank_total,
        debtrank2,
        debtrank2_total,
        debtrank2_converged,
        direct_impact: direct,
        direct_impact_total,
        pearson_r_i,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(rows: &[&[f64]], equity: &[f64]) -> BankingSystem {
        let l = SquareMatrix::from_nested(rows).unwrap();
        BankingSystem::with_default_ids(equity.to_vec(), l).unwrap()
    }

    fn chain() -> BankingSystem {
        system(
            &[&[0.0, 5.0, 0.0], &[0.0, 0.0, 5.0], &[0.0, 0.0, 0.0]],
            &[10.0, 10.0, 10.0],
        )
    }

    #[test]
    fn debtrank_two_bank() {
        let sys = system(&[&[0.0, 5.0], &[0.0, 0.0]], &[10.0, 10.0]);
        let w = sys.impact_matrix();
        let agg = sys.aggregates();
        assert!((debtrank_single(&sys, &w, &agg, 0) - 0.5).abs() < 1e-15);
        assert_eq!(debtrank_single(&sys, &w, &agg, 1), 0.0);
    }

    #[test]
    fn debtrank_chain_trajectory() {
        let sys = chain();
        let w = sys.impact_matrix();
        let agg = sys.aggregates();
        let (r0, state) = debtrank_single_with_state(&sys, &w, &agg, 0);
        assert_eq!(state.h, vec![1.0, 0.5, 0.25]);
        assert!((r0 - 0.375).abs() < 1e-15);
    }

    #[test]
    fn debtrank_all_chain() {
        let (r, total) = debtrank_all(&chain());
        assert!((r[0] - 0.375).abs() < 1e-15);
        assert!((r[1] - 0.25).abs() < 1e-15);
        assert_eq!(r[2], 0.0);
        assert!((total - 0.625).abs() < 1e-15);
    }

    #[test]
    fn debtrank_zero_network() {
        let sys = BankingSystem::with_default_ids(vec![1.0; 3], SquareMatrix::zeros(3)).unwrap();
        let (r, total) = debtrank_all(&sys);
        assert_eq!(r, vec![0.0; 3]);
        assert_eq!(total, 0.0);
    }

    #[test]
    fn debtrank_terminates_within_n_plus_one_steps() {
        // Dense cyclic network; each node still transmits only once.
        let sys = system(
            &[
                &[0.0, 2.0, 2.0, 2.0],
                &[2.0, 0.0, 2.0, 2.0],
                &[2.0, 2.0, 0.0, 2.0],
                &[2.0, 2.0, 2.0, 0.0],
            ],
            &[10.0; 4],
        );
        let w = sys.impact_matrix();
        let agg = sys.aggregates();
        let (_, state) = debtrank_single_with_state(&sys, &w, &agg, 0);
        assert!(state.t <= sys.n() + 1);
        assert!(state.s.iter().all(|&s| s != NodeState::Distressed));
    }

    #[test]
    fn debtrank2_equals_debtrank_on_tree() {
        let sys = chain();
        let w = sys.impact_matrix();
        let agg = sys.aggregates();
        let (r2, converged) = debtrank2_single(
            &sys,
            &w,
            &agg,
            0,
            DebtRank2Options {
                epsilon: 1e-12,
                max_iterations: 10_000,
            },
        );
        assert!(converged);
        assert!((r2 - 0.375).abs() < 1e-12);
    }

    #[test]
    fn debtrank2_exceeds_debtrank_on_loop_off_seed() {
        // Seed 0 hits bank 1; banks 1 and 2 owe each other, so increments
        // circulate in the 1-2 loop: the geometric series gives
        // h_1 -> 0.5/(1-0.25) = 2/3 and h_2 -> 0.25/(1-0.25) = 1/3.
        let sys = system(
            &[&[0.0, 5.0, 0.0], &[0.0, 0.0, 5.0], &[0.0, 5.0, 0.0]],
            &[10.0, 10.0, 10.0],
        );
        let w = sys.impact_matrix();
        let agg = sys.aggregates();
        let r = debtrank_single(&sys, &w, &agg, 0);
        let (r2, converged) = debtrank2_single(
            &sys,
            &w,
            &agg,
            0,
            DebtRank2Options {
                epsilon: 1e-12,
                max_iterations: 10_000,
            },
        );
        assert!(converged);
        // v = (0, 2/3, 1/3); R = 0.625*(2/3) + 0.25*(1/3) = 0.5
        assert!((r - 0.5).abs() < 1e-12);
        // R2 = (2/3)*(2/3) + (1/3)*(1/3) = 5/9
        assert!((r2 - 5.0 / 9.0).abs() < 1e-9);
        assert!(r2 > r + 1e-3);
    }

    #[test]
    fn debtrank2_zero_network() {
        let sys = BankingSystem::with_default_ids(vec![1.0; 3], SquareMatrix::zeros(3)).unwrap();
        let (r2, total, converged) = debtrank2_all(&sys, DebtRank2Options::default());
        assert_eq!(r2, vec![0.0; 3]);
        assert_eq!(total, 0.0);
        assert!(converged);
    }

    #[test]
    fn direct_impact_examples() {
        let sys = system(&[&[0.0, 5.0], &[0.0, 0.0]], &[10.0, 10.0]);
        let (impact, total) = direct_impact(&sys);
        assert_eq!(impact, vec![0.5, 0.0]);
        assert_eq!(total, 0.5);

        let (impact, total) = direct_impact(&chain());
        assert_eq!(impact, vec![0.25, 0.25, 0.0]);
        assert_eq!(total, 0.5);
    }

    #[test]
    fn direct_impact_capped_ring() {
        let sys = system(
            &[&[0.0, 6.0, 0.0], &[0.0, 0.0, 6.0], &[6.0, 0.0, 0.0]],
            &[4.0, 4.0, 4.0],
        );
        let (impact, total) = direct_impact(&sys);
        for v in &impact {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_degenerate_is_none() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), None);
        assert_eq!(pearson(&[1.0], &[1.0]), None);
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
