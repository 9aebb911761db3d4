//! Scenario files: a network, its cost model, and run parameters in one JSON
//! document.
//!
//! ```json
//! {
//!   "name": "toy_sym",
//!   "nodes": 2,
//!   "edges": [[1, 2], [1, 2]],
//!   "sources": [{"node": 1, "demand": 2.0}],
//!   "paths": [[{"edges": [1]}, {"edges": [2]}]],
//!   "rho": [1.0, 1.0],
//!   "solver": {"step_size": 0.05},
//!   "analysis": {"s": 0.5}
//! }
//! ```
//!
//! `a` defaults to zeros and `b` to ones. Paths are node walks or
//! `{"edges": [...]}` lists of 1-based edge indices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::network::{build_network, Network, NetworkSpec, PathSpec, SourceSpec};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisParams {
    pub s: f64,
    pub q: Option<f64>,
    pub eta: Option<f64>,
    pub num_starts: Option<usize>,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            s: 0.5,
            q: None,
            eta: None,
            num_starts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub comment: String,
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub sources: Vec<SourceSpec>,
    pub paths: Vec<Vec<PathSpec>>,
    pub rho: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisParams,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let (net, cm) = self.build()?;
        cm.check_network(&net)?;
        self.solver_config().validate()?;
        let s = self.analysis.s;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "s must lie in (0, 1), got {s}"
            )));
        }
        for (name, v) in [("q", self.analysis.q), ("eta", self.analysis.eta)] {
            if let Some(v) = v {
                if v.is_nan() || v <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "{name} must be positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn network_spec(&self) -> NetworkSpec {
        NetworkSpec {
            nodes: self.nodes,
            edges: self.edges.clone(),
            sources: self.sources.clone(),
            paths: self.paths.clone(),
        }
    }

    pub fn network(&self) -> Result<Network> {
        build_network(&self.network_spec())
    }

    pub fn cost_model(&self) -> Result<CostModel> {
        let l = self.rho.len();
        CostModel::new(
            self.rho.clone(),
            self.a.clone().unwrap_or_else(|| vec![0.0; l]),
            self.b.clone().unwrap_or_else(|| vec![1.0; l]),
        )
    }

    pub fn build(&self) -> Result<(Network, CostModel)> {
        let net = self.network()?;
        let cm = self.cost_model()?;
        cm.check_network(&net)?;
        Ok((net, cm))
    }

    /// Solver settings with the analysis `num_starts` override applied.
    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = self.solver.clone();
        if let Some(n) = self.analysis.num_starts {
            cfg.num_starts = n;
        }
        cfg
    }

    /// Copy with `rho[index]` (0-based) replaced.
    pub fn with_rho(&self, index: usize, value: f64) -> Result<Self> {
        if index >= self.rho.len() {
            return Err(Error::IndexOutOfRange {
                index,
                count: self.rho.len(),
            });
        }
        let mut sc = self.clone();
        sc.rho[index] = value;
        sc.validate()?;
        Ok(sc)
    }
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        /// Names of the scenarios compiled into the crate.
        pub const BUNDLED: &[&str] = &[$($name),*];

        fn bundled_text(name: &str) -> Option<&'static str> {
            match name {
                $($name => Some(include_str!(concat!("../scenarios/", $name, ".json"))),)*
                _ => None,
            }
        }
    };
}

bundled!(
    "fig2_case1",
    "fig2_case2",
    "fig2_case3",
    "fig2_case4",
    "fig2_case5",
    "fig5",
    "toy_sym",
    "toy_13",
    "theta_zero",
    "redundant",
    "two_dm",
);

/// The five Table-1 cases on the eight-node network.
pub const FIG2_CASES: [&str; 5] = [
    "fig2_case1",
    "fig2_case2",
    "fig2_case3",
    "fig2_case4",
    "fig2_case5",
];

pub fn bundled(name: &str) -> Result<Scenario> {
    let text = bundled_text(name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled scenario named {name:?}")))?;
    Scenario::from_json(text)
}

/// Load a file path, or a bundled scenario when the argument has the form
/// `bundled:<name>`.
pub fn resolve(arg: &str) -> Result<Scenario> {
    match arg.strip_prefix("bundled:") {
        Some(name) => bundled(name),
        None => Scenario::load(arg),
    }
}
