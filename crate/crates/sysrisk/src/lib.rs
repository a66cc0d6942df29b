//! Network-based systemic risk: DebtRank-style contagion measures on
//! interbank exposure networks, and exact rewiring of those networks to
//! their (approximate) systemic-risk minimum or maximum via a mixed-integer
//! linear program that preserves every bank's interbank assets, liabilities,
//! and risk-weighted exposure.
//!
//! The crate is organized around a few cooperating pieces:
//!
//! * [`network`] — the [`network::BankingSystem`] (liability matrix, equity,
//!   credit-risk indicators) and derived quantities;
//! * [`contagion`] — DebtRank, DebtRank2, and direct impact;
//! * [`model`] — deterministic construction of the rewiring MILP
//!   (vectorization, variable split, indicator rows, constraint blocks);
//! * [`solver`] — branch and bound over an in-crate bounded revised simplex,
//!   plus [`oracle`], an independent enumeration oracle for small instances;
//! * [`metrics`] — topology measures (density, assortativity, clustering,
//!   weighted nearest-neighbor degree, volume thresholding);
//! * [`synth`] — seeded synthetic network generation;
//! * [`io`] — CSV network formats and free MPS export/import;
//! * [`report`] — the end-to-end pipeline and its versioned JSON report.
//!
//! See the crate examples for a runnable tour of each capability.

pub mod contagion;
pub mod error;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod network;
pub mod oracle;
pub mod report;
pub mod simplex;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use network::{leverage_kappa, BankingSystem, DerivedAggregates, ImpactMatrix};
