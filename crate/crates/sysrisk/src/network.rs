//! Canonical representation of an interbank exposure network.
//!
//! A [`BankingSystem`] holds the liability matrix `L` (entry `L[i][j]` is the
//! amount bank `i` owes bank `j`), equities, and per-bank credit-risk
//! indicators. Everything downstream (contagion measures, the rewiring
//! optimization, topology metrics) derives from it.

use crate::matrix::SquareMatrix;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// An interbank market of N banks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankingSystem {
    bank_ids: Vec<String>,
    equity: Vec<f64>,
    liabilities: SquareMatrix,
    kappa: Vec<f64>,
}

/// Row/column sums of the liability matrix and relative bank weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedAggregates {
    /// Interbank liabilities l_i (row sums): total borrowing of bank i.
    pub liabilities: Vec<f64>,
    /// Interbank assets a_i (column sums): total lending of bank i.
    pub assets: Vec<f64>,
    /// Total interbank market volume.
    pub total_volume: f64,
    /// Relative weights v_i = a_i / total_volume (all zero for an empty market).
    pub weights: Vec<f64>,
}

/// Impact matrix W with W[i][j] = min(L[i][j] / e_j, 1): the share of
/// creditor j's equity destroyed by debtor i's default.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactMatrix(pub SquareMatrix);

/// A single validation finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    NonzeroDiagonal { index: usize, value: f64 },
    NegativeEntry { row: usize, col: usize, value: f64 },
    NonPositiveEquity { index: usize, value: f64 },
    NonPositiveKappa { index: usize, value: f64 },
    NonFinite { what: String },
    DuplicateBankId { id: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonzeroDiagonal { index, value } => {
                write!(f, "nonzero diagonal at {index} (value {value})")
            }
            Violation::NegativeEntry { row, col, value } => {
                write!(f, "negative liability at ({row},{col}) (value {value})")
            }
            Violation::NonPositiveEquity { index, value } => {
                write!(f, "non-positive equity at {index} (value {value})")
            }
            Violation::NonPositiveKappa { index, value } => {
                write!(f, "non-positive kappa at {index} (value {value})")
            }
            Violation::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Violation::DuplicateBankId { id } => write!(f, "duplicate bank id {id:?}"),
        }
    }
}

/// Result of [`BankingSystem::validate`]; empty iff the system is well-formed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl BankingSystem {
    /// Build a system with kappa defaulting to 1 for every bank.
    ///
    /// Only shape errors are rejected here; content problems (negative
    /// entries, nonzero diagonal, ...) are surfaced by [`Self::validate`].
    pub fn new(
        bank_ids: Vec<String>,
        equity: Vec<f64>,
        liabilities: SquareMatrix,
    ) -> Result<Self> {
        let n = liabilities.n();
        let kappa = vec![1.0; n];
        Self::with_kappa(bank_ids, equity, liabilities, kappa)
    }

    /// Build a system with explicit per-bank credit-risk indicators.
    pub fn with_kappa(
        bank_ids: Vec<String>,
        equity: Vec<f64>,
        liabilities: SquareMatrix,
        kappa: Vec<f64>,
    ) -> Result<Self> {
        let n = liabilities.n();
        if bank_ids.len() != n || equity.len() != n || kappa.len() != n {
            return Err(Error::Dimension(format!(
                "matrix is {n}x{n} but got {} ids, {} equities, {} kappas",
                bank_ids.len(),
                equity.len(),
                kappa.len()
            )));
        }
        Ok(BankingSystem {
            bank_ids,
            equity,
            liabilities,
            kappa,
        })
    }

    /// Convenience constructor with ids "b0", "b1", ... for tests and synthetic data.
    pub fn with_default_ids(equity: Vec<f64>, liabilities: SquareMatrix) -> Result<Self> {
        let ids = (0..liabilities.n()).map(|i| format!("b{i}")).collect();
        Self::new(ids, equity, liabilities)
    }

    pub fn n(&self) -> usize {
        self.liabilities.n()
    }

    pub fn bank_ids(&self) -> &[String] {
        &self.bank_ids
    }

    pub fn equity(&self) -> &[f64] {
        &self.equity
    }

    pub fn liabilities(&self) -> &SquareMatrix {
        &self.liabilities
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn set_kappa(&mut self, kappa: Vec<f64>) -> Result<()> {
        if kappa.len() != self.n() {
            return Err(Error::Dimension(format!(
                "expected {} kappas, got {}",
                self.n(),
                kappa.len()
            )));
        }
        self.kappa = kappa;
        Ok(())
    }

    /// Replace the liability matrix, keeping equities and kappa.
    pub fn with_liabilities(&self, liabilities: SquareMatrix) -> Result<Self> {
        Self::with_kappa(
            self.bank_ids.clone(),
            self.equity.clone(),
            liabilities,
            self.kappa.clone(),
        )
    }

    /// Scale all equities by `factor` (used for monotonicity checks).
    pub fn with_scaled_equity(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.equity {
            *e *= factor;
        }
        out
    }

    /// Report-style validation: collects every violation instead of failing fast.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n();
        let mut violations = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for id in &self.bank_ids {
            if !seen.insert(id.as_str()) {
                violations.push(Violation::DuplicateBankId { id: id.clone() });
            }
        }
        for i in 0..n {
            let d = self.liabilities.get(i, i);
            if d != 0.0 {
                violations.push(Violation::NonzeroDiagonal { index: i, value: d });
            }
            if !(self.equity[i] > 0.0) {
                violations.push(Violation::NonPositiveEquity {
                    index: i,
                    value: self.equity[i],
                });
            }
            if !(self.kappa[i] > 0.0) {
                violations.push(Violation::NonPositiveKappa {
                    index: i,
                    value: self.kappa[i],
                });
            }
            if !self.equity[i].is_finite() {
                violations.push(Violation::NonFinite {
                    what: format!("equity[{i}]"),
                });
            }
            if !self.kappa[i].is_finite() {
                violations.push(Violation::NonFinite {
                    what: format!("kappa[{i}]"),
                });
            }
            for j in 0..n {
                let v = self.liabilities.get(i, j);
                if v < 0.0 {
                    violations.push(Violation::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                if !v.is_finite() {
                    violations.push(Violation::NonFinite {
                        what: format!("liabilities[{i}][{j}]"),
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Validate and turn any violation into an error (for CLI entry points).
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidSystem(msgs.join("; ")))
        }
    }

    /// Row sums, column sums, total volume, and relative weights.
    pub fn aggregates(&self) -> DerivedAggregates {
        let liabilities = self.liabilities.row_sums();
        let assets = self.liabilities.col_sums();
        let total_volume: f64 = liabilities.iter().sum();
        let weights = if total_volume > 0.0 {
            assets.iter().map(|a| a / total_volume).collect()
        } else {
            vec![0.0; self.n()]
        };
        DerivedAggregates {
            liabilities,
            assets,
            total_volume,
            weights,
        }
    }

    /// W[i][j] = min(L[i][j] / e_j, 1).
    pub fn impact_matrix(&self) -> ImpactMatrix {
        let n = self.n();
        let mut w = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let l = self.liabilities.get(i, j);
                if l > 0.0 {
                    w.set(i, j, (l / self.equity[j]).min(1.0));
                }
            }
        }
        ImpactMatrix(w)
    }
}

/// kappa_i = total_assets_i / (total_assets_i - total_liabilities_i),
/// the leverage-ratio proxy for credit riskiness.
///
/// Errors when any balance sheet has total assets <= total liabilities.
pub fn leverage_kappa(total_assets: &[f64], total_liabilities: &[f64]) -> Result<Vec<f64>> {
    if total_assets.len() != total_liabilities.len() {
        return Err(Error::Dimension(format!(
            "{} asset totals vs {} liability totals",
            total_assets.len(),
            total_liabilities.len()
        )));
    }
    total_assets
        .iter()
        .zip(total_liabilities)
        .enumerate()
        .map(|(i, (&ta, &tl))| {
            let denom = ta - tl;
            if denom > 0.0 && ta.is_finite() && tl.is_finite() {
                Ok(ta / denom)
            } else {
                Err(Error::InsolventBalanceSheet(i))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bank() -> BankingSystem {
        let l = SquareMatrix::from_nested(&[&[0.0, 5.0], &[0.0, 0.0]]).unwrap();
        BankingSystem::with_default_ids(vec![10.0, 10.0], l).unwrap()
    }

    #[test]
    fn validate_flags_nonzero_diagonal() {
        let mut l = SquareMatrix::zeros(2);
        l.set(0, 0, 1.0);
        let sys = BankingSystem::with_default_ids(vec![1.0, 1.0], l).unwrap();
        let report = sys.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonzeroDiagonal { index: 0, .. })));
    }

    #[test]
    fn validate_accepts_zero_matrix() {
        let sys =
            BankingSystem::with_default_ids(vec![1.0, 1.0, 1.0], SquareMatrix::zeros(3)).unwrap();
        assert!(sys.validate().is_ok());
    }

    #[test]
    fn validate_flags_zero_equity() {
        let sys = BankingSystem::with_default_ids(vec![0.0, 1.0], SquareMatrix::zeros(2)).unwrap();
        let report = sys.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonPositiveEquity { index: 0, .. })));
    }

    #[test]
    fn aggregates_two_bank() {
        let agg = two_bank().aggregates();
        assert_eq!(agg.liabilities, vec![5.0, 0.0]);
        assert_eq!(agg.assets, vec![0.0, 5.0]);
        assert_eq!(agg.total_volume, 5.0);
        assert_eq!(agg.weights, vec![0.0, 1.0]);
    }

    #[test]
    fn aggregates_zero_matrix() {
        let sys = BankingSystem::with_default_ids(vec![1.0; 3], SquareMatrix::zeros(3)).unwrap();
        let agg = sys.aggregates();
        assert_eq!(agg.total_volume, 0.0);
        assert_eq!(agg.weights, vec![0.0; 3]);
    }

    #[test]
    fn aggregates_chain() {
        let l = SquareMatrix::from_nested(&[
            &[0.0, 5.0, 0.0],
            &[0.0, 0.0, 5.0],
            &[0.0, 0.0, 0.0],
        ])
        .unwrap();
        let sys = BankingSystem::with_default_ids(vec![10.0; 3], l).unwrap();
        let agg = sys.aggregates();
        assert_eq!(agg.assets, vec![0.0, 5.0, 5.0]);
        assert_eq!(agg.total_volume, 10.0);
        assert_eq!(agg.weights, vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn impact_matrix_caps_at_one() {
        let mut l = SquareMatrix::zeros(2);
        l.set(0, 1, 20.0);
        let sys = BankingSystem::with_default_ids(vec![10.0, 10.0], l).unwrap();
        assert_eq!(sys.impact_matrix().0.get(0, 1), 1.0);

        let sys2 = two_bank();
        assert_eq!(sys2.impact_matrix().0.get(0, 1), 0.5);

        let zero = BankingSystem::with_default_ids(vec![1.0; 2], SquareMatrix::zeros(2)).unwrap();
        assert_eq!(zero.impact_matrix().0.as_slice(), &[0.0; 4]);
    }

    #[test]
    fn leverage_kappa_formula() {
        assert_eq!(leverage_kappa(&[100.0], &[90.0]).unwrap(), vec![10.0]);
        assert_eq!(leverage_kappa(&[100.0], &[0.0]).unwrap(), vec![1.0]);
        assert!(leverage_kappa(&[100.0], &[100.0]).is_err());
    }

    #[test]
    fn row_col_balance() {
        let sys = two_bank();
        let agg = sys.aggregates();
        let sum_l: f64 = agg.liabilities.iter().sum();
        let sum_a: f64 = agg.assets.iter().sum();
        assert!((sum_l - sum_a).abs() / sum_l.max(1.0) < 1e-12);
    }
}
