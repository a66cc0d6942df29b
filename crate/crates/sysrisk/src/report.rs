//! End-to-end analysis pipeline and its versioned JSON report.
//!
//! One run computes risk and topology for the empirical network, solves the
//! rewiring MILP in both directions, thresholds the empirical network at the
//! configured volume coverage, and assembles everything into a [`RunReport`]
//! (schema `sysrisk-report/1`). Reports are deterministic byte-for-byte by
//! default; wall-clock timings are only included on request since they would
//! break reproducibility.

use crate::contagion::{pearson, risk_report, DebtRank2Options, RiskReport};
use crate::matrix::SquareMatrix;
use crate::metrics::{threshold_network, topology_report, AssortativityConvention, TopologyReport};
use crate::model::{build_problem, objective_value, presolve, Direction, RiskSense};
use crate::network::BankingSystem;
use crate::solver::{solve, MilpSolution, SolveOptions, SolveStatus};
use crate::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_SCHEMA: &str = "sysrisk-report/1";

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Volume coverage of the thresholded variant.
    pub threshold_coverage: f64,
    pub risk_sense: RiskSense,
    pub solve: SolveOptions,
    pub debtrank2: DebtRank2Options,
    pub assortativity: AssortativityConvention,
    /// Include wall-clock timings (breaks byte-identical reports).
    pub include_timings: bool,
    /// Label for the `run` column of the long-format CSV.
    pub run_label: String,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            threshold_coverage: 0.9,
            risk_sense: RiskSense::Equality,
            solve: SolveOptions::default(),
            debtrank2: DebtRank2Options::default(),
            assortativity: AssortativityConvention::default(),
            include_timings: false,
            run_label: "run0".into(),
        }
    }
}

/// Risk and topology of one network variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSection {
    pub risk: RiskReport,
    pub topology: TopologyReport,
    /// Un-normalized objective (equals total direct impact times volume).
    pub objective: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub status: SolveStatus,
    pub objective: f64,
    pub gap: f64,
    pub node_count: u64,
    pub lp_iterations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

/// Pearson correlations between DebtRank and direct impact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationReport {
    /// Across banks, per network variant.
    pub bank_level_empirical: Option<f64>,
    pub bank_level_minimized: Option<f64>,
    pub bank_level_maximized: Option<f64>,
    pub bank_level_thresholded: Option<f64>,
    /// Across the four variants' totals.
    pub totals_across_networks: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    /// SHA-256 of the canonical JSON encoding of the input system.
    pub input_digest: String,
    pub n_banks: usize,
    pub total_volume: f64,
    pub threshold_coverage: f64,
    pub risk_sense: RiskSense,
    pub empirical: NetworkSection,
    pub minimized: NetworkSection,
    pub maximized: NetworkSection,
    pub thresholded: NetworkSection,
    pub solver_minimize: SolverDiagnostics,
    pub solver_maximize: SolverDiagnostics,
    /// R_total(empirical) / R_total(minimized); absent when the denominator is 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_factor_debtrank: Option<f64>,
    /// I_total(empirical) / I_total(minimized); absent when the denominator is 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_factor_impact: Option<f64>,
    pub correlations: CorrelationReport,
}

fn digest_of(system: &BankingSystem) -> String {
    let canonical = serde_json::to_vec(system).expect("system serializes");
    let mut hasher = Sha256::new();
    hasher.update(&canonical);
    let hash = hasher.finalize();
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

fn section(
    system: &BankingSystem,
    liabilities: &SquareMatrix,
    options: &PipelineOptions,
) -> Result<NetworkSection> {
    let variant = system.with_liabilities(liabilities.clone())?;
    Ok(NetworkSection {
        risk: risk_report(&variant, options.debtrank2),
        topology: topology_report(liabilities, options.assortativity),
        objective: objective_value(system, liabilities),
    })
}

fn diagnostics(solution: &MilpSolution, include_timings: bool) -> SolverDiagnostics {
    SolverDiagnostics {
        status: solution.status,
        objective: solution.objective,
        gap: solution.gap,
        node_count: solution.node_count,
        lp_iterations: solution.lp_iterations,
        wall_time_seconds: include_timings.then_some(solution.wall_time_seconds),
    }
}

/// Run the full pipeline on a validated system.
pub fn run_pipeline(system: &BankingSystem, options: &PipelineOptions) -> Result<RunReport> {
    system.ensure_valid()?;
    let agg = system.aggregates();

    let min_problem = presolve(&build_problem(system, Direction::Minimize, options.risk_sense));
    let min_solution = solve(&min_problem, &options.solve)?;
    let max_problem = presolve(&build_problem(system, Direction::Maximize, options.risk_sense));
    let max_solution = solve(&max_problem, &options.solve)?;

    let empirical = section(system, system.liabilities(), options)?;
    let minimized = section(system, &min_solution.l_star, options)?;
    let maximized = section(system, &max_solution.l_star, options)?;
    let thresholded = section(
        system,
        &threshold_network(system.liabilities(), options.threshold_coverage),
        options,
    )?;

    let ratio = |num: f64, den: f64| (den > 0.0).then_some(num / den);
    let reduction_factor_debtrank = ratio(
        empirical.risk.debtrank_total,
        minimized.risk.debtrank_total,
    );
    let reduction_factor_impact = ratio(
        empirical.risk.direct_impact_total,
        minimized.risk.direct_impact_total,
    );

    let totals_r: Vec<f64> = [&empirical, &minimized, &maximized, &thresholded]
        .iter()
        .map(|s| s.risk.debtrank_total)
        .collect();
    let totals_i: Vec<f64> = [&empirical, &minimized, &maximized, &thresholded]
        .iter()
        .map(|s| s.risk.direct_impact_total)
        .collect();
    let correlations = CorrelationReport {
        bank_level_empirical: empirical.risk.pearson_r_i,
        bank_level_minimized: minimized.risk.pearson_r_i,
        bank_level_maximized: maximized.risk.pearson_r_i,
        bank_level_thresholded: thresholded.risk.pearson_r_i,
        totals_across_networks: pearson(&totals_r, &totals_i),
    };

    Ok(RunReport {
        schema: REPORT_SCHEMA.into(),
        input_digest: digest_of(system),
        n_banks: system.n(),
        total_volume: agg.total_volume,
        threshold_coverage: options.threshold_coverage,
        risk_sense: options.risk_sense,
        empirical,
        minimized,
        maximized,
        thresholded,
        solver_minimize: diagnostics(&min_solution, options.include_timings),
        solver_maximize: diagnostics(&max_solution, options.include_timings),
        reduction_factor_debtrank,
        reduction_factor_impact,
        correlations,
    })
}

/// Plot-ready long-format CSV: `run,network_type,metric,value`.
pub fn report_to_long_csv(report: &RunReport, run_label: &str) -> String {
    let mut out = String::from("run,network_type,metric,value\n");
    let mut push = |network: &str, metric: &str, value: Option<f64>| {
        let rendered = value.map_or(String::new(), |v| format!("{v}"));
        out.push_str(&format!("{run_label},{network},{metric},{rendered}\n"));
    };
    let sections = [
        ("empirical", &report.empirical),
        ("minimized", &report.minimized),
        ("maximized", &report.maximized),
        ("thresholded", &report.thresholded),
    ];
    for (name, s) in sections {
        push(name, "debtrank_total", Some(s.risk.debtrank_total));
        push(name, "debtrank2_total", Some(s.risk.debtrank2_total));
        push(
            name,
            "direct_impact_total",
            Some(s.risk.direct_impact_total),
        );
        push(name, "objective", Some(s.objective));
        push(name, "link_density", Some(s.topology.link_density));
        push(name, "mean_clustering", Some(s.topology.mean_clustering));
        push(
            name,
            "degree_assortativity",
            s.topology.degree_assortativity,
        );
        push(
            name,
            "weighted_nn_degree_mean",
            s.topology.weighted_nn_degree_mean,
        );
        push(name, "pearson_r_i", s.risk.pearson_r_i);
    }
    push(
        "summary",
        "reduction_factor_debtrank",
        report.reduction_factor_debtrank,
    );
    push(
        "summary",
        "reduction_factor_impact",
        report.reduction_factor_impact,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3_t3() -> BankingSystem {
        let l = SquareMatrix::from_nested(&[
            &[0.0, 3.0, 3.0],
            &[3.0, 0.0, 3.0],
            &[3.0, 3.0, 0.0],
        ])
        .unwrap();
        BankingSystem::with_default_ids(vec![4.0; 3], l).unwrap()
    }

    #[test]
    fn ring_family_reduction_factor() {
        let report = run_pipeline(&ring3_t3(), &PipelineOptions::default()).unwrap();
        // I_emp = 27/18 = 1.5, I_min = 18/18 = 1.0
        assert!((report.empirical.risk.direct_impact_total - 1.5).abs() < 1e-8);
        assert!((report.minimized.risk.direct_impact_total - 1.0).abs() < 1e-8);
        let factor = report.reduction_factor_impact.unwrap();
        assert!((factor - 1.5).abs() < 1e-8, "impact reduction {factor}");
        // objectives recorded in the report sandwich the empirical one
        assert!(report.minimized.objective <= report.empirical.objective + 1e-9);
        assert!(report.maximized.objective >= report.empirical.objective - 1e-9);
    }

    #[test]
    fn zero_network_has_no_reduction_factor() {
        let sys =
            BankingSystem::with_default_ids(vec![1.0; 3], SquareMatrix::zeros(3)).unwrap();
        let report = run_pipeline(&sys, &PipelineOptions::default()).unwrap();
        assert_eq!(report.empirical.risk.debtrank_total, 0.0);
        assert_eq!(report.reduction_factor_debtrank, None);
        assert_eq!(report.reduction_factor_impact, None);
        assert_eq!(report.total_volume, 0.0);
    }

    #[test]
    fn report_serializes_and_round_trips() {
        let report = run_pipeline(&ring3_t3(), &PipelineOptions::default()).unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schema, REPORT_SCHEMA);
        assert_eq!(back.input_digest, report.input_digest);
        // timings stay out of the default report
        assert!(!json.contains("wall_time_seconds"));
    }

    #[test]
    fn deterministic_reports_are_byte_identical() {
        let a = run_pipeline(&ring3_t3(), &PipelineOptions::default()).unwrap();
        let b = run_pipeline(&ring3_t3(), &PipelineOptions::default()).unwrap();
        let ja = serde_json::to_string_pretty(&a).unwrap();
        let jb = serde_json::to_string_pretty(&b).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn long_csv_has_all_sections() {
        let report = run_pipeline(&ring3_t3(), &PipelineOptions::default()).unwrap();
        let csv = report_to_long_csv(&report, "q1");
        assert!(csv.starts_with("run,network_type,metric,value\n"));
        for network in ["empirical", "minimized", "maximized", "thresholded"] {
            assert!(csv.contains(&format!("q1,{network},link_density,")));
        }
        assert!(csv.contains("q1,summary,reduction_factor_impact,"));
    }
}
