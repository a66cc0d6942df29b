//! Topology measures of exposure networks: link density, degrees,
//! assortativity, clustering, weighted nearest-neighbor degree, and
//! volume-coverage thresholding.
//!
//! All measures except thresholding work on the binary structure or on
//! normalized ratios, so they are invariant under uniform rescaling of the
//! link weights.

use crate::matrix::SquareMatrix;
use serde::{Deserialize, Serialize};

/// How the per-link excess degrees (j_i, k_i) of the assortativity formula
/// are read off a directed link. The formula labels them the excess degrees
/// of the nodes "at the beginning and the end" of each link; which degree
/// type each endpoint contributes is a convention, so all three useful
/// readings are available. Reports always name the convention used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AssortativityConvention {
    /// Source excess out-degree vs target excess in-degree.
    #[default]
    SourceOutTargetIn,
    /// Source excess in-degree vs target excess out-degree.
    SourceInTargetOut,
    /// Excess total (in+out) degree on both endpoints.
    TotalDegrees,
}

/// Topology summary of one network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyReport {
    /// m / (N (N-1)).
    pub link_density: f64,
    pub in_degrees: Vec<usize>,
    pub out_degrees: Vec<usize>,
    /// None when the excess-degree variance is degenerate.
    pub degree_assortativity: Option<f64>,
    pub assortativity_convention: AssortativityConvention,
    /// Mean local clustering coefficient of the symmetrized graph.
    pub mean_clustering: f64,
    pub local_clustering: Vec<f64>,
    /// Per node; None for isolated nodes, which the mean excludes.
    pub weighted_nn_degree: Vec<Option<f64>>,
    pub weighted_nn_degree_mean: Option<f64>,
}

/// Fraction of possible directed links present.
pub fn link_density(l: &SquareMatrix) -> f64 {
    let n = l.n();
    if n < 2 {
        return 0.0;
    }
    l.link_count() as f64 / (n * (n - 1)) as f64
}

/// In-degrees (creditor side) and out-degrees (debtor side) of the binary graph.
pub fn degrees(l: &SquareMatrix) -> (Vec<usize>, Vec<usize>) {
    let n = l.n();
    let mut in_deg = vec![0usize; n];
    let mut out_deg = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && l.get(i, j) > 0.0 {
                out_deg[i] += 1;
                in_deg[j] += 1;
            }
        }
    }
    (in_deg, out_deg)
}

/// Pearson correlation of per-link excess degrees (Newman's directed form):
///
///   r = [sum j_i k_i - (sum j_i)(sum k_i)/m] /
///       sqrt([sum j_i^2 - (sum j_i)^2/m] [sum k_i^2 - (sum k_i)^2/m])
///
/// Returns None when fewer than two links exist or a variance term vanishes.
pub fn degree_assortativity(
    l: &SquareMatrix,
    convention: AssortativityConvention,
) -> Option<f64> {
    let n = l.n();
    let (in_deg, out_deg) = degrees(l);
    let mut js: Vec<f64> = Vec::new();
    let mut ks: Vec<f64> = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s == t || l.get(s, t) <= 0.0 {
                continue;
            }
            let (j, k) = match convention {
                AssortativityConvention::SourceOutTargetIn => {
                    (out_deg[s] as f64 - 1.0, in_deg[t] as f64 - 1.0)
                }
                AssortativityConvention::SourceInTargetOut => {
                    (in_deg[s] as f64 - 1.0, out_deg[t] as f64 - 1.0)
                }
                AssortativityConvention::TotalDegrees => (
                    (in_deg[s] + out_deg[s]) as f64 - 1.0,
                    (in_deg[t] + out_deg[t]) as f64 - 1.0,
                ),
            };
            js.push(j);
            ks.push(k);
        }
    }
    let m = js.len() as f64;
    if js.len() < 2 {
        return None;
    }
    let sum_j: f64 = js.iter().sum();
    let sum_k: f64 = ks.iter().sum();
    let sum_jk: f64 = js.iter().zip(&ks).map(|(a, b)| a * b).sum();
    let sum_j2: f64 = js.iter().map(|v| v * v).sum();
    let sum_k2: f64 = ks.iter().map(|v| v * v).sum();
    let var_j = sum_j2 - sum_j * sum_j / m;
    let var_k = sum_k2 - sum_k * sum_k / m;
    if var_j <= 1e-12 || var_k <= 1e-12 {
        return None;
    }
    Some(((sum_jk - sum_j * sum_k / m) / (var_j * var_k).sqrt()).clamp(-1.0, 1.0))
}

/// Local clustering coefficients of the symmetrized unweighted graph and
/// their mean over all nodes. Nodes with fewer than two neighbors get 0.
pub fn avg_clustering(l: &SquareMatrix) -> (f64, Vec<f64>) {
    let n = l.n();
    let adj = |a: usize, b: usize| a != b && (l.get(a, b) > 0.0 || l.get(b, a) > 0.0);
    let mut local = vec![0.0; n];
    for i in 0..n {
        let neighbors: Vec<usize> = (0..n).filter(|&j| adj(i, j)).collect();
        let d = neighbors.len();
        if d < 2 {
            continue;
        }
        let mut connected = 0usize;
        for (a, &u) in neighbors.iter().enumerate() {
            for &v in &neighbors[a + 1..] {
                if adj(u, v) {
                    connected += 1;
                }
            }
        }
        local[i] = connected as f64 / (d * (d - 1) / 2) as f64;
    }
    let mean = if n > 0 {
        local.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    (mean, local)
}

/// Weighted nearest-neighbor degree
/// k^w_nn(i) = (a_i + l_i)^-1 * sum_j (L_ij + L_ji) k_j
/// with k_j the total binary degree. Isolated nodes yield None and are
/// excluded from the mean.
pub fn weighted_nn_degree(l: &SquareMatrix) -> (Vec<Option<f64>>, Option<f64>) {
    let n = l.n();
    let (in_deg, out_deg) = degrees(l);
    let total_deg: Vec<f64> = (0..n).map(|i| (in_deg[i] + out_deg[i]) as f64).collect();
    let row_sums = l.row_sums();
    let col_sums = l.col_sums();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let strength = row_sums[i] + col_sums[i];
        if strength <= 0.0 {
            out.push(None);
            continue;
        }
        let mut acc = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = l.get(i, j) + l.get(j, i);
            if w > 0.0 {
                acc += w * total_deg[j];
            }
        }
        out.push(Some(acc / strength));
    }
    let values: Vec<f64> = out.iter().flatten().copied().collect();
    let mean = if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    };
    (out, mean)
}

/// Keep the largest links until they cover `coverage` of the total volume,
/// zeroing the rest. Ties at the cutoff break by (row, col) order.
pub fn threshold_network(l: &SquareMatrix, coverage: f64) -> SquareMatrix {
    assert!(
        coverage > 0.0 && coverage <= 1.0,
        "coverage must be in (0, 1]"
    );
    let n = l.n();
    let total = l.total();
    let mut out = SquareMatrix::zeros(n);
    if total <= 0.0 {
        return out;
    }
    let mut links: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && l.get(i, j) > 0.0 {
                links.push((l.get(i, j), i, j));
            }
        }
    }
    links.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| (a.1, a.2).cmp(&(b.1, b.2)))
    });
    let target = coverage * total;
    let mut kept = 0.0;
    for (w, i, j) in links {
        if kept >= target {
            break;
        }
        out.set(i, j, w);
        kept += w;
    }
    out
}

/// All topology measures of one network.
pub fn topology_report(
    l: &SquareMatrix,
    convention: AssortativityConvention,
) -> TopologyReport {
    let (in_degrees, out_degrees) = degrees(l);
    let (mean_clustering, local_clustering) = avg_clustering(l);
    let (weighted_nn, weighted_nn_mean) = weighted_nn_degree(l);
    TopologyReport {
        link_density: link_density(l),
        in_degrees,
        out_degrees,
        degree_assortativity: degree_assortativity(l, convention),
        assortativity_convention: convention,
        mean_clustering,
        local_clustering,
        weighted_nn_degree: weighted_nn,
        weighted_nn_degree_mean: weighted_nn_mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_nested(rows).unwrap()
    }

    #[test]
    fn density_complete_and_zero() {
        let complete = matrix(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        assert_eq!(link_density(&complete), 1.0);
        assert_eq!(link_density(&SquareMatrix::zeros(4)), 0.0);
    }

    #[test]
    fn density_three_link_ring() {
        let ring = matrix(&[&[0.0, 6.0, 0.0], &[0.0, 0.0, 6.0], &[6.0, 0.0, 0.0]]);
        assert_eq!(link_density(&ring), 0.5);
    }

    /// Straight covariance evaluation, kept separate from the production path.
    fn assortativity_oracle(pairs: &[(f64, f64)]) -> Option<f64> {
        let m = pairs.len() as f64;
        let mean_j = pairs.iter().map(|p| p.0).sum::<f64>() / m;
        let mean_k = pairs.iter().map(|p| p.1).sum::<f64>() / m;
        let cov: f64 = pairs.iter().map(|p| (p.0 - mean_j) * (p.1 - mean_k)).sum();
        let var_j: f64 = pairs.iter().map(|p| (p.0 - mean_j).powi(2)).sum();
        let var_k: f64 = pairs.iter().map(|p| (p.1 - mean_k).powi(2)).sum();
        if var_j <= 1e-12 || var_k <= 1e-12 {
            return None;
        }
        Some(cov / (var_j * var_k).sqrt())
    }

    #[test]
    fn assortativity_matches_covariance_oracle() {
        // A star with one extra peripheral link so the variance is not
        // degenerate: 0 -> 1, 0 -> 2, 0 -> 3, 1 -> 2.
        let l = matrix(&[
            &[0.0, 1.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let (in_deg, out_deg) = degrees(&l);
        let links = [(0usize, 1usize), (0, 2), (0, 3), (1, 2)];
        let pairs: Vec<(f64, f64)> = links
            .iter()
            .map(|&(s, t)| (out_deg[s] as f64 - 1.0, in_deg[t] as f64 - 1.0))
            .collect();
        let expected = assortativity_oracle(&pairs).unwrap();
        let got = degree_assortativity(&l, AssortativityConvention::SourceOutTargetIn).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!(got < 0.0, "hub-dominated graphs are disassortative: {got}");
    }

    #[test]
    fn assortativity_undefined_on_regular_ring() {
        let ring = matrix(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert_eq!(
            degree_assortativity(&ring, AssortativityConvention::SourceOutTargetIn),
            None
        );
    }

    #[test]
    fn assortativity_two_link_path_total_degrees() {
        // a -> b -> c with total-degree convention: pairs (0,1) and (1,0);
        // hand evaluation of the two-term sums gives exactly -1.
        let path = matrix(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let r = degree_assortativity(&path, AssortativityConvention::TotalDegrees).unwrap();
        assert!((r - (-1.0)).abs() < 1e-12);
        // the out/in convention is degenerate here
        assert_eq!(
            degree_assortativity(&path, AssortativityConvention::SourceOutTargetIn),
            None
        );
    }

    #[test]
    fn clustering_triangle_and_path() {
        let triangle = matrix(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        let (mean, local) = avg_clustering(&triangle);
        assert_eq!(local, vec![1.0, 1.0, 1.0]);
        assert_eq!(mean, 1.0);

        let path = matrix(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let (_, local) = avg_clustering(&path);
        assert_eq!(local[1], 0.0);
    }

    #[test]
    fn clustering_triangle_with_pendant() {
        // Triangle 0-1-2 plus pendant 3 attached to 0. Brute counts:
        // C_0 = 1/3 (neighbors 1,2,3; one connected pair), C_1 = C_2 = 1, C_3 = 0.
        let l = matrix(&[
            &[0.0, 1.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let (mean, local) = avg_clustering(&l);
        assert!((local[0] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(local[1], 1.0);
        assert_eq!(local[2], 1.0);
        assert_eq!(local[3], 0.0);
        assert!((mean - (1.0 / 3.0 + 2.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_nn_two_bank_and_ring() {
        let two = matrix(&[&[0.0, 5.0], &[0.0, 0.0]]);
        let (values, _) = weighted_nn_degree(&two);
        assert_eq!(values[0], Some(1.0));

        let ring = matrix(&[&[0.0, 6.0, 0.0], &[0.0, 0.0, 6.0], &[6.0, 0.0, 0.0]]);
        let (values, mean) = weighted_nn_degree(&ring);
        for v in values {
            assert_eq!(v, Some(2.0));
        }
        assert_eq!(mean, Some(2.0));
    }

    #[test]
    fn weighted_nn_excludes_isolated() {
        let l = matrix(&[&[0.0, 5.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let (values, mean) = weighted_nn_degree(&l);
        assert_eq!(values[2], None);
        assert!(mean.is_some());
    }

    #[test]
    fn threshold_cumulative_cutoff() {
        // weights 10, 5, 3, 2; coverage 0.9 of 20 needs 18: keep 10, 5, 3.
        let l = matrix(&[
            &[0.0, 10.0, 5.0, 0.0],
            &[0.0, 0.0, 3.0, 0.0],
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let t = threshold_network(&l, 0.9);
        assert_eq!(t.get(0, 1), 10.0);
        assert_eq!(t.get(0, 2), 5.0);
        assert_eq!(t.get(1, 2), 3.0);
        assert_eq!(t.get(2, 0), 0.0);
        assert_eq!(t.link_count(), 3);
    }

    #[test]
    fn threshold_full_coverage_is_identity() {
        let l = matrix(&[&[0.0, 10.0], &[4.0, 0.0]]);
        assert_eq!(threshold_network(&l, 1.0), l);
        // a single link survives any positive coverage
        let single = matrix(&[&[0.0, 7.0], &[0.0, 0.0]]);
        assert_eq!(threshold_network(&single, 0.01), single);
    }

    #[test]
    fn metrics_scale_invariance() {
        let l = matrix(&[
            &[0.0, 10.0, 5.0, 0.0],
            &[1.0, 0.0, 3.0, 0.0],
            &[2.0, 0.0, 0.0, 4.0],
            &[0.0, 6.0, 0.0, 0.0],
        ]);
        let doubled = l.scale(2.0);
        assert_eq!(link_density(&l), link_density(&doubled));
        assert_eq!(
            degree_assortativity(&l, AssortativityConvention::default()),
            degree_assortativity(&doubled, AssortativityConvention::default())
        );
        assert_eq!(avg_clustering(&l).0, avg_clustering(&doubled).0);
        let (nn_a, _) = weighted_nn_degree(&l);
        let (nn_b, _) = weighted_nn_degree(&doubled);
        for (a, b) in nn_a.iter().zip(&nn_b) {
            match (a, b) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-12),
                (None, None) => {}
                _ => panic!("isolation pattern changed under scaling"),
            }
        }
    }

    #[test]
    fn threshold_density_monotone_in_coverage() {
        let l = matrix(&[
            &[0.0, 10.0, 5.0, 0.0],
            &[1.0, 0.0, 3.0, 0.0],
            &[2.0, 0.0, 0.0, 4.0],
            &[0.0, 6.0, 0.0, 0.0],
        ]);
        let mut last = 0.0;
        for coverage in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let d = link_density(&threshold_network(&l, coverage));
            assert!(d >= last - 1e-12);
            last = d;
        }
    }

    #[test]
    fn threshold_keeps_weights_and_meets_coverage() {
        let l = matrix(&[
            &[0.0, 9.0, 2.0],
            &[4.0, 0.0, 1.0],
            &[3.0, 5.0, 0.0],
        ]);
        let coverage = 0.75;
        let t = threshold_network(&l, coverage);
        for i in 0..3 {
            for j in 0..3 {
                let v = t.get(i, j);
                assert!(v == 0.0 || v == l.get(i, j));
            }
        }
        assert!(t.total() >= coverage * l.total() - 1e-12);
        // dropping the smallest kept link would violate coverage
        let mut smallest: Option<(usize, usize)> = None;
        for i in 0..3 {
            for j in 0..3 {
                if t.get(i, j) > 0.0
                    && smallest.is_none_or(|(a, b)| t.get(i, j) < t.get(a, b))
                {
                    smallest = Some((i, j));
                }
            }
        }
        let (a, b) = smallest.unwrap();
        assert!(t.total() - t.get(a, b) < coverage * l.total());
    }
}
