//! Team-optimal and selfish routing on shared networks.
//!
//! Several decision makers each split a fixed demand over their own paths to a
//! common destination. Edges carry congestion cost `rho_l z_l^2`. This crate
//! computes team optima and Nash equilibria with projected dynamics, and
//! quantifies how far apart they are.

pub mod analysis;
pub mod cost;
pub mod error;
pub mod network;
pub mod projection;
pub mod reproduce;
pub mod scenario;
pub mod solver;

pub use analysis::{
    coincidence_certificate, hausdorff, perturbation_sup, strategy_profile_cost_table,
    strong_monotonicity_constant, theorem1_report, theorem2_report, CoincidenceReport, CostTable,
    DeviationReport, HausdorffReport,
};
pub use cost::{CostModel, Operator};
pub use error::{Error, Result};
pub use network::{
    build_network, BlockVector, FlowProfile, Network, NetworkSpec, PathSpec, SourceSpec,
};
pub use projection::{project_profile, project_simplex};
pub use scenario::Scenario;
pub use solver::{
    multi_start, solve_dynamics, vi_residual, SolutionSet, SolveResult, SolverConfig,
};
