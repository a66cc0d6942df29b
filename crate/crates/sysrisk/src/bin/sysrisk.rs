//! Command-line front end: validation, risk measures, optimization, topology
//! metrics, MPS export, synthetic data, and the full pipeline.
//!
//! Exit codes: 0 success, 2 validation failure, 3 solver failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use sysrisk::contagion::{self, DebtRank2Options};
use sysrisk::io;
use sysrisk::metrics::{self, AssortativityConvention};
use sysrisk::model::{build_problem, presolve, Direction, RiskSense};
use sysrisk::network::BankingSystem;
use sysrisk::report::{report_to_long_csv, run_pipeline, PipelineOptions};
use sysrisk::solver::{solve, SolveOptions, SolveStatus};
use sysrisk::synth;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sysrisk",
    version,
    about = "Systemic risk measures and risk-optimal rewiring of exposure networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct NetworkArgs {
    /// Banks CSV: bank_id,equity[,total_assets,total_liabilities][,kappa]
    #[arg(long)]
    banks: PathBuf,
    /// Exposures CSV: debtor_id,creditor_id,amount
    #[arg(long)]
    exposures: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Min,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum RiskSenseArg {
    Eq,
    Geq,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Dr,
    Dr2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    OutIn,
    InOut,
    Total,
}

impl From<DirectionArg> for Direction {
    fn from(v: DirectionArg) -> Self {
        match v {
            DirectionArg::Min => Direction::Minimize,
            DirectionArg::Max => Direction::Maximize,
        }
    }
}

impl From<RiskSenseArg> for RiskSense {
    fn from(v: RiskSenseArg) -> Self {
        match v {
            RiskSenseArg::Eq => RiskSense::Equality,
            RiskSenseArg::Geq => RiskSense::GreaterEqual,
        }
    }
}

impl From<ConventionArg> for AssortativityConvention {
    fn from(v: ConventionArg) -> Self {
        match v {
            ConventionArg::OutIn => AssortativityConvention::SourceOutTargetIn,
            ConventionArg::InOut => AssortativityConvention::SourceInTargetOut,
            ConventionArg::Total => AssortativityConvention::TotalDegrees,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a network for structural violations.
    Validate(NetworkArgs),
    /// Per-bank DebtRank (or DebtRank2) and totals.
    Debtrank {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, value_enum, default_value = "dr")]
        variant: VariantArg,
        /// Convergence threshold for DebtRank2.
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Rewire the network to its minimal or maximal direct impact.
    Optimize {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value = "eq")]
        risk_sense: RiskSenseArg,
        /// Relative optimality gap tolerance.
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        /// Time limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Write the optimized network's exposures CSV here.
        #[arg(long)]
        output_exposures: Option<PathBuf>,
    },
    /// Topology metrics of the network and its thresholded variant.
    Metrics {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, default_value_t = 0.9)]
        threshold_coverage: f64,
        #[arg(long, value_enum, default_value = "out-in")]
        convention: ConventionArg,
    },
    /// Export the rewiring MILP in free MPS format.
    ExportMps {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, value_enum, default_value = "min")]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value = "eq")]
        risk_sense: RiskSenseArg,
        /// Skip the presolve bound fixing.
        #[arg(long)]
        no_presolve: bool,
        /// Output path (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic network and write its CSV files.
    GenSynth {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Equity as this fraction of interbank assets plus one.
        #[arg(long, default_value_t = 0.25)]
        equity_phi: f64,
        #[arg(long)]
        banks_out: PathBuf,
        #[arg(long)]
        exposures_out: PathBuf,
    },
    /// Full analysis: empirical/minimized/maximized/thresholded report.
    Pipeline {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, default_value_t = 0.9)]
        threshold_coverage: f64,
        #[arg(long, value_enum, default_value = "eq")]
        risk_sense: RiskSenseArg,
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        #[arg(long)]
        time_limit: Option<f64>,
        /// Report JSON output path (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write plot-ready long-format CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Label for the CSV `run` column.
        #[arg(long, default_value = "run0")]
        run_label: String,
        /// Include wall-clock timings (reports stop being byte-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

fn load(network: &NetworkArgs) -> Result<BankingSystem, ExitCode> {
    match io::parse_network(&network.banks, &network.exposures) {
        Ok(system) => Ok(system),
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(EXIT_VALIDATION))
        }
    }
}

fn load_valid(network: &NetworkArgs) -> Result<BankingSystem, ExitCode> {
    let system = load(network)?;
    let report = system.validate();
    if !report.is_ok() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        return Err(ExitCode::from(EXIT_VALIDATION));
    }
    Ok(system)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Validate(network) => {
            let system = load(&network)?;
            let report = system.validate();
            if report.is_ok() {
                println!(
                    "ok: {} banks, {} links",
                    system.n(),
                    system.liabilities().link_count()
                );
                Ok(())
            } else {
                for v in &report.violations {
                    println!("violation: {v}");
                }
                Err(ExitCode::from(EXIT_VALIDATION))
            }
        }
        Command::Debtrank {
            network,
            variant,
            epsilon,
        } => {
            let system = load_valid(&network)?;
            match variant {
                VariantArg::Dr => {
                    let (r, total) = contagion::debtrank_all(&system);
                    for (id, value) in system.bank_ids().iter().zip(&r) {
                        println!("{id} {value:.9}");
                    }
                    println!("total {total:.9}");
                }
                VariantArg::Dr2 => {
                    let options = DebtRank2Options {
                        epsilon,
                        ..Default::default()
                    };
                    let (r2, total, converged) = contagion::debtrank2_all(&system, options);
                    for (id, value) in system.bank_ids().iter().zip(&r2) {
                        println!("{id} {value:.9}");
                    }
                    println!("total {total:.9}");
                    if !converged {
                        eprintln!("warning: iteration cap hit before epsilon convergence");
                    }
                }
            }
            Ok(())
        }
        Command::Optimize {
            network,
            direction,
            risk_sense,
            gap,
            time_limit,
            output_exposures,
        } => {
            let system = load_valid(&network)?;
            let problem = presolve(&build_problem(&system, direction.into(), risk_sense.into()));
            let options = SolveOptions {
                gap_tolerance: gap,
                time_limit_seconds: time_limit,
                ..Default::default()
            };
            let solution = match solve(&problem, &options) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("solver error: {e}");
                    return Err(ExitCode::from(EXIT_SOLVER));
                }
            };
            if solution.status == SolveStatus::Infeasible {
                eprintln!("solver: infeasible");
                return Err(ExitCode::from(EXIT_SOLVER));
            }
            println!("status {:?}", solution.status);
            println!("objective {:.12}", solution.objective);
            println!("gap {:.3e}", solution.gap);
            println!("nodes {}", solution.node_count);
            println!(
                "links {} (empirical {})",
                solution.l_star.link_count(),
                system.liabilities().link_count()
            );
            if let Some(path) = output_exposures {
                let rewired = system
                    .with_liabilities(solution.l_star.clone())
                    .expect("dimensions preserved");
                let (_, exposures) = io::write_network_strings(&rewired);
                if let Err(e) = std::fs::write(&path, exposures) {
                    eprintln!("error writing {}: {e}", path.display());
                    return Err(ExitCode::from(EXIT_SOLVER));
                }
            }
            Ok(())
        }
        Command::Metrics {
            network,
            threshold_coverage,
            convention,
        } => {
            let system = load_valid(&network)?;
            let report = metrics::topology_report(system.liabilities(), convention.into());
            let thresholded = metrics::topology_report(
                &metrics::threshold_network(system.liabilities(), threshold_coverage),
                convention.into(),
            );
            let doc = serde_json::json!({
                "empirical": report,
                "thresholded": thresholded,
                "threshold_coverage": threshold_coverage,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            );
            Ok(())
        }
        Command::ExportMps {
            network,
            direction,
            risk_sense,
            no_presolve,
            output,
        } => {
            let system = load_valid(&network)?;
            let mut problem = build_problem(&system, direction.into(), risk_sense.into());
            if !no_presolve {
                problem = presolve(&problem);
            }
            let text = io::mps::export_mps(&problem);
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error writing {}: {e}", path.display());
                        return Err(ExitCode::from(EXIT_SOLVER));
                    }
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::GenSynth {
            n,
            density,
            seed,
            equity_phi,
            banks_out,
            exposures_out,
        } => {
            let params = synth::SynthParams {
                n,
                target_density: density,
                seed,
                equity: synth::EquityRule::FractionOfAssets { phi: equity_phi },
                ..Default::default()
            };
            let system = synth::generate(&params).expect("valid params");
            if let Err(e) = io::write_network(&system, &banks_out, &exposures_out) {
                eprintln!("error: {e}");
                return Err(ExitCode::from(EXIT_VALIDATION));
            }
            println!(
                "wrote {} banks, {} links",
                system.n(),
                system.liabilities().link_count()
            );
            Ok(())
        }
        Command::Pipeline {
            network,
            threshold_coverage,
            risk_sense,
            gap,
            time_limit,
            report,
            csv,
            run_label,
            timings,
        } => {
            let system = load_valid(&network)?;
            let options = PipelineOptions {
                threshold_coverage,
                risk_sense: risk_sense.into(),
                solve: SolveOptions {
                    gap_tolerance: gap,
                    time_limit_seconds: time_limit,
                    ..Default::default()
                },
                include_timings: timings,
                run_label: run_label.clone(),
                ..Default::default()
            };
            let run = match run_pipeline(&system, &options) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("pipeline error: {e}");
                    return Err(ExitCode::from(EXIT_SOLVER));
                }
            };
            let json = serde_json::to_string_pretty(&run).expect("serializable");
            match report {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json) {
                        eprintln!("error writing {}: {e}", path.display());
                        return Err(ExitCode::from(EXIT_SOLVER));
                    }
                }
                None => println!("{json}"),
            }
            if let Some(path) = csv {
                if let Err(e) = std::fs::write(&path, report_to_long_csv(&run, &run_label)) {
                    eprintln!("error writing {}: {e}", path.display());
                    return Err(ExitCode::from(EXIT_SOLVER));
                }
            }
            Ok(())
        }
    }
}
