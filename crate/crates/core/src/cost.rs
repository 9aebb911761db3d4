//! Team, selfish, and potential-game costs with their exact gradients.
//!
//! Edge costs are fixed to the quadratic transmission cost `f(z) = z^2` and the
//! linear unit-flow cost `g(z) = a + b z`; the model only carries their
//! parameters.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{FlowProfile, GradientVector, Network};

/// Per-edge cost parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub rho: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl CostModel {
    pub fn new(rho: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let cm = Self { rho, a, b };
        cm.validate()?;
        Ok(cm)
    }

    /// `a = 0`, `b = 1` on every edge.
    pub fn with_rho(rho: Vec<f64>) -> Result<Self> {
        let l = rho.len();
        Self::new(rho, vec![0.0; l], vec![1.0; l])
    }

    pub fn num_edges(&self) -> usize {
        self.rho.len()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.rho.len();
        if self.a.len() != l || self.b.len() != l {
            return Err(Error::InvalidCostModel(format!(
                "|rho| = {}, |a| = {}, |b| = {} must agree",
                l,
                self.a.len(),
                self.b.len()
            )));
        }
        for e in 0..l {
            if !(self.rho[e].is_finite() && self.rho[e] > 0.0) {
                return Err(Error::InvalidCostModel(format!(
                    "rho[{}] must be > 0",
                    e + 1
                )));
            }
            if !(self.a[e].is_finite() && self.a[e] >= 0.0) {
                return Err(Error::InvalidCostModel(format!(
                    "a[{}] must be >= 0",
                    e + 1
                )));
            }
            if !(self.b[e].is_finite() && self.b[e] > 0.0) {
                return Err(Error::InvalidCostModel(format!("b[{}] must be > 0", e + 1)));
            }
        }
        Ok(())
    }

    pub fn check_network(&self, net: &Network) -> Result<()> {
        if self.num_edges() != net.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: net.num_edges(),
                got: self.num_edges(),
            });
        }
        Ok(())
    }
}

/// Which operator drives the dynamics or defines a VI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    /// Gradient of the team cost, `G`.
    Team,
    /// Pseudo-gradient of the selfish payoffs, `F`.
    Game,
    /// Pseudo-gradient of the potential-game payoffs, `F~`.
    Potential,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Team => "team",
            Operator::Game => "ne",
            Operator::Potential => "potential",
        }
    }
}

fn check(net: &Network, cm: &CostModel, u: &FlowProfile) -> Result<()> {
    cm.check_network(net)?;
    net.check_dims(u)
}

/// Team cost `sum_l rho_l z_l^2`.
pub fn team_cost(net: &Network, cm: &CostModel, u: &FlowProfile) -> Result<f64> {
    check(net, cm, u)?;
    Ok(team_cost_raw(net, cm, u.as_slice()))
}

pub(crate) fn team_cost_raw(net: &Network, cm: &CostModel, u: &[f64]) -> f64 {
    net.edge_flows_unchecked(u)
        .iter()
        .zip(&cm.rho)
        .map(|(z, r)| r * z * z)
        .sum()
}

/// Selfish payoff of source `i`: its own share of every edge times the
/// edge's unit-flow cost.
pub fn individual_cost(net: &Network, cm: &CostModel, i: usize, u: &FlowProfile) -> Result<f64> {
    check(net, cm, u)?;
    net.check_source(i)?;
    let z = net.edge_flows_unchecked(u.as_slice());
    let own = net.own_edge_flows(i, u.as_slice());
    Ok((0..net.num_edges())
        .filter(|&l| net.touches(i, l))
        .map(|l| cm.rho[l] * own[l] * (cm.a[l] + cm.b[l] * z[l]))
        .sum())
}

/// Potential-game payoff of source `i`: the team cost restricted to the
/// edges `i` touches.
pub fn potential_payoff(net: &Network, cm: &CostModel, i: usize, u: &FlowProfile) -> Result<f64> {
    check(net, cm, u)?;
    net.check_source(i)?;
    let z = net.edge_flows_unchecked(u.as_slice());
    Ok((0..net.num_edges())
        .filter(|&l| net.touches(i, l))
        .map(|l| cm.rho[l] * z[l] * z[l])
        .sum())
}

/// `G(u)`: gradient of [`team_cost`].
pub fn team_gradient(net: &Network, cm: &CostModel, u: &FlowProfile) -> Result<GradientVector> {
    evaluate(net, cm, Operator::Team, u)
}

/// `F(u)`: own-block gradients of every [`individual_cost`].
pub fn pseudo_gradient(net: &Network, cm: &CostModel, u: &FlowProfile) -> Result<GradientVector> {
    evaluate(net, cm, Operator::Game, u)
}

/// `F~(u)`: own-block gradients of every [`potential_payoff`]. Equal to
/// [`team_gradient`] entrywise, but computed from the payoff definition.
pub fn potential_pseudo_gradient(
    net: &Network,
    cm: &CostModel,
    u: &FlowProfile,
) -> Result<GradientVector> {
    evaluate(net, cm, Operator::Potential, u)
}

/// `theta(u) = G(u) - F(u)`.
pub fn perturbation(net: &Network, cm: &CostModel, u: &FlowProfile) -> Result<GradientVector> {
    let g = team_gradient(net, cm, u)?;
    let f = pseudo_gradient(net, cm, u)?;
    Ok(g.sub(&f))
}

pub fn evaluate(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    u: &FlowProfile,
) -> Result<GradientVector> {
    check(net, cm, u)?;
    let mut out = vec![0.0; u.len()];
    apply_raw(net, cm, op, u.as_slice(), &mut out);
    u.with_values(out)
}

/// Operator evaluation on raw slices; dimensions are the caller's problem.
pub(crate) fn apply_raw(net: &Network, cm: &CostModel, op: Operator, u: &[f64], out: &mut [f64]) {
    let z = net.edge_flows_unchecked(u);
    for i in 0..net.num_sources() {
        let own = match op {
            Operator::Game => Some(net.own_edge_flows(i, u)),
            _ => None,
        };
        for k in 0..net.num_paths(i) {
            let col = net.column(i, k);
            out[col] = match op {
                Operator::Team => net
                    .path_edges(i, k)
                    .iter()
                    .map(|&l| 2.0 * cm.rho[l] * z[l])
                    .sum(),
                Operator::Game => {
                    let own = own.as_ref().unwrap();
                    net.path_edges(i, k)
                        .iter()
                        .map(|&l| cm.rho[l] * (cm.a[l] + cm.b[l] * z[l] + cm.b[l] * own[l]))
                        .sum()
                }
                Operator::Potential => {
                    // d/du_ik of sum_l rho_l omega(l,i) z_l^2, edge by edge
                    let path = net.path_edges(i, k);
                    (0..net.num_edges())
                        .filter(|&l| net.touches(i, l))
                        .map(|l| {
                            let sigma = if path.contains(&l) { 1.0 } else { 0.0 };
                            cm.rho[l] * 2.0 * z[l] * sigma
                        })
                        .sum()
                }
            };
        }
    }
}

/// Constant Jacobian of the (affine) operator.
///
/// Team and potential: `2 A^T diag(rho) A`. Game: `A^T diag(rho b) A` plus,
/// on each diagonal block, `A_i^T diag(rho b) A_i`.
pub fn jacobian(net: &Network, cm: &CostModel, op: Operator) -> DMatrix<f64> {
    let a = net.incidence();
    let n = net.total_paths();
    let weights: Vec<f64> = match op {
        Operator::Team | Operator::Potential => cm.rho.iter().map(|r| 2.0 * r).collect(),
        Operator::Game => cm.rho.iter().zip(&cm.b).map(|(r, b)| r * b).collect(),
    };
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(weights));
    let mut j = a.transpose() * &d * a;
    if op == Operator::Game {
        for i in 0..net.num_sources() {
            let (lo, len) = (net.offsets()[i], net.num_paths(i));
            let ai = a.columns(lo, len);
            let own = ai.transpose() * &d * ai;
            let mut block = j.view_mut((lo, lo), (len, len));
            block += own;
        }
    }
    debug_assert_eq!(j.nrows(), n);
    j
}
