//! Deviation analysis between team optima and equilibria.
//!
//! Everything here works with affine operators, whose Jacobians are constant,
//! so the strong-monotonicity constants come from a single symmetric
//! eigenproblem on the tangent space of the demand constraints.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{self, CostModel, Operator};
use crate::error::{Error, Result};
use crate::network::{distance, norm, FlowProfile, GradientVector, Network};
use crate::solver::{self, multi_start, random_profile, solve_dynamics, start_rng, SolverConfig};

/// Vertex enumeration limit for the exact `delta` scan.
pub const MAX_ENUMERATED_PATHS: usize = 12;
/// Coordinates at or above this count as interior.
pub const INTERIOR_TOL: f64 = 1e-6;
/// Default number of random samples added to the `delta` scan.
pub const DEFAULT_DELTA_SAMPLES: usize = 256;

/// Orthonormal basis of `{d : sum_k d_ik = 0 for every i}` (Helmert vectors
/// per block), as an `n x (n - N)` matrix.
pub fn tangent_basis(net: &Network) -> DMatrix<f64> {
    let n = net.total_paths();
    let dim = n - net.num_sources();
    let mut z = DMatrix::zeros(n, dim);
    let mut col = 0;
    for i in 0..net.num_sources() {
        let lo = net.offsets()[i];
        for j in 1..net.num_paths(i) {
            let scale = 1.0 / ((j * (j + 1)) as f64).sqrt();
            for k in 0..j {
                z[(lo + k, col)] = scale;
            }
            z[(lo + j, col)] = -(j as f64) * scale;
            col += 1;
        }
    }
    z
}

/// Removes each block's mean, i.e. the component normal to the demand
/// constraints.
pub fn tangent_component(v: &GradientVector) -> GradientVector {
    let mut out = v.clone();
    for i in 0..v.num_blocks() {
        let b = out.block_mut(i);
        let mean = b.iter().sum::<f64>() / b.len() as f64;
        b.iter_mut().for_each(|x| *x -= mean);
    }
    out
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Strong-monotonicity constant of `op` on the joint strategy set.
///
/// The smallest eigenvalue of the symmetric Jacobian part restricted to the
/// tangent space; values below `1e-10` times the matrix scale are reported
/// as 0. With an empty tangent space (every source has one path) the
/// full-space value is returned instead.
pub fn strong_monotonicity_constant(net: &Network, cm: &CostModel, op: Operator) -> Result<f64> {
    cm.check_network(net)?;
    let j = cost::jacobian(net, cm, op);
    let sym = (&j + j.transpose()) * 0.5;
    let scale = sym.amax().max(f64::MIN_POSITIVE);
    let z = tangent_basis(net);
    let lambda = if z.ncols() == 0 {
        min_eigenvalue(&sym)
    } else {
        min_eigenvalue(&(z.transpose() * &sym * &z))
    };
    Ok(if lambda < 1e-10 * scale { 0.0 } else { lambda })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub num_samples: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            num_samples: DEFAULT_DELTA_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// True when the scan is provably the supremum: the ball covers the
    /// strategy set and all vertices were enumerated.
    pub exact: bool,
    pub covers_strategy_set: bool,
    pub vertices_scanned: usize,
    pub samples: usize,
}

/// Largest vertex distance from `center`; `None` when there are too many
/// vertices to enumerate.
pub fn covering_radius(net: &Network, center: &FlowProfile) -> Option<f64> {
    if net.total_paths() > MAX_ENUMERATED_PATHS {
        return None;
    }
    Some(
        net.vertices()
            .iter()
            .map(|v| v.distance(center))
            .fold(0.0, f64::max),
    )
}

/// Estimate `sup |theta(u)|` over `{u in strategy set : |u - center| < q}`.
///
/// `theta` is affine, so its norm is convex and the supremum over the whole
/// strategy set sits at a vertex. Vertices inside the ball are scanned when
/// there are at most [`MAX_ENUMERATED_PATHS`] paths; seeded samples from the
/// ball (and the center itself) are always added.
pub fn perturbation_sup(
    net: &Network,
    cm: &CostModel,
    center: &FlowProfile,
    q: f64,
    sampling: Sampling,
) -> Result<DeltaEstimate> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "q must be positive, got {q}"
        )));
    }
    net.check_dims(center)?;
    let theta_norm =
        |u: &FlowProfile| -> Result<f64> { Ok(cost::perturbation(net, cm, u)?.norm()) };

    let mut delta = theta_norm(center)?;
    let mut vertices_scanned = 0;
    let enumerable = net.total_paths() <= MAX_ENUMERATED_PATHS;
    let mut covers = false;
    if enumerable {
        covers = true;
        for v in net.vertices() {
            if v.distance(center) < q {
                delta = delta.max(theta_norm(&v)?);
                vertices_scanned += 1;
            } else {
                covers = false;
            }
        }
    }
    let mut rng = start_rng(sampling.seed, u64::MAX);
    for _ in 0..sampling.num_samples {
        let w = random_profile(net, &mut rng);
        let d = w.distance(center);
        let u = if d < q {
            w
        } else {
            // pull toward the center along the segment; stays feasible
            let t = q * rng.gen::<f64>() / d;
            let vals = center
                .as_slice()
                .iter()
                .zip(w.as_slice())
                .map(|(c, x)| c + t * (x - c))
                .collect();
            center.with_values(vals)?
        };
        delta = delta.max(theta_norm(&u)?);
    }
    Ok(DeltaEstimate {
        delta,
        exact: enumerable && covers,
        covers_strategy_set: covers,
        vertices_scanned,
        samples: sampling.num_samples,
    })
}

/// Deviation-bound report for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub case: String,
    pub kappa1: f64,
    pub kappa2: f64,
    pub delta: f64,
    pub delta_exact: bool,
    pub s: f64,
    pub q: f64,
    /// Smallest radius whose ball around the team optimum covers the
    /// strategy set (when enumerable).
    pub q_cover: Option<f64>,
    /// `delta / (kappa1 s)`; absent when `kappa1 = 0`.
    pub bound: Option<f64>,
    pub measured_deviation: f64,
    pub bound_satisfied: bool,
    /// All hypotheses hold: `kappa1 > 0`, `kappa2 > 0`, `delta < kappa1 s q`.
    pub applicable: bool,
    pub team_cost: f64,
    pub ne_cost: f64,
    pub cost_gap: f64,
    pub team_profile: FlowProfile,
    pub ne_profile: FlowProfile,
}

/// Flat CSV row: `case,kappa1,kappa2,delta,s,q,bound,deviation,bound_satisfied`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub case: String,
    pub kappa1: f64,
    pub kappa2: f64,
    pub delta: f64,
    pub s: f64,
    pub q: f64,
    pub bound: Option<f64>,
    pub deviation: f64,
    pub bound_satisfied: bool,
}

impl DeviationReport {
    pub fn row(&self) -> DeviationRow {
        DeviationRow {
            case: self.case.clone(),
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            delta: self.delta,
            s: self.s,
            q: self.q,
            bound: self.bound,
            deviation: self.measured_deviation,
            bound_satisfied: self.bound_satisfied,
        }
    }
}

pub fn deviation_csv(reports: &[DeviationReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r.row())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn solve_converged(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    cfg: &SolverConfig,
) -> Result<solver::SolveResult> {
    let r = solve_dynamics(net, cm, op, cfg, &net.uniform_profile())?;
    if !r.converged {
        return Err(Error::NotConverged(format!(
            "{} dynamics stopped at residual {:.3e} after {} iterations",
            op.name(),
            r.residual,
            r.iterations
        )));
    }
    Ok(r)
}

/// Solve both problems and assemble the deviation bound.
///
/// With `q = None` the radius is chosen large enough that the ball covers
/// the strategy set and `delta < kappa1 s q` holds.
pub fn theorem1_report(
    net: &Network,
    cm: &CostModel,
    cfg: &SolverConfig,
    s: f64,
    q: Option<f64>,
) -> Result<DeviationReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "s must lie in (0, 1), got {s}"
        )));
    }
    let team = solve_converged(net, cm, Operator::Team, cfg)?;
    let ne = solve_converged(net, cm, Operator::Game, cfg)?;
    let kappa1 = strong_monotonicity_constant(net, cm, Operator::Team)?;
    let kappa2 = strong_monotonicity_constant(net, cm, Operator::Game)?;
    let sampling = Sampling {
        num_samples: DEFAULT_DELTA_SAMPLES,
        seed: cfg.seed,
    };
    let center = &team.profile;
    let q_cover = covering_radius(net, center);
    let (q, est) = match q {
        Some(q) => (q, perturbation_sup(net, cm, center, q, sampling)?),
        None => {
            let cover = q_cover.unwrap_or_else(|| {
                // diameter of the product of simplices
                net.demands()
                    .iter()
                    .map(|r| 2.0 * r * r)
                    .sum::<f64>()
                    .sqrt()
            });
            let radius = cover * (1.0 + 1e-9) + 1e-12;
            let est = perturbation_sup(net, cm, center, radius, sampling)?;
            let needed = if kappa1 > 0.0 {
                est.delta / (kappa1 * s)
            } else {
                0.0
            };
            (1.01 * radius.max(needed), est)
        }
    };
    let delta = est.delta;
    let bound = (kappa1 > 0.0).then(|| delta / (kappa1 * s));
    let measured_deviation = team.profile.distance(&ne.profile);
    Ok(DeviationReport {
        case: String::new(),
        kappa1,
        kappa2,
        delta,
        delta_exact: est.exact,
        s,
        q,
        q_cover,
        bound,
        measured_deviation,
        bound_satisfied: bound.is_some_and(|b| measured_deviation <= b + 1e-9),
        applicable: kappa1 > 0.0 && kappa2 > 0.0 && delta < kappa1 * s * q,
        team_cost: team.cost,
        ne_cost: ne.cost,
        cost_gap: (team.cost - ne.cost).abs(),
        team_profile: team.profile,
        ne_profile: ne.profile,
    })
}

/// Hausdorff distance between finite point sets.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let dim = a[0].len();
    if let Some(bad) = a.iter().chain(b).find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let directed = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| distance(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

fn as_vectors(points: &[FlowProfile]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.as_slice().to_vec()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub h_strategy: f64,
    pub h_gradient: f64,
    /// Same distance between the tangent components of the gradient images.
    pub h_gradient_tangent: f64,
    pub eta: f64,
    pub kappa2: f64,
    pub bound: Option<f64>,
    pub premise_holds: bool,
    pub bound_satisfied: bool,
    /// `kappa2 |u* - u'| <= |F(u*) - F(u')| + 1e-9` over every sampled pair.
    pub pointwise_ok: bool,
    pub min_pointwise_slack: f64,
    pub ne_interior: bool,
    /// `max |P_T F(u*)|` over the team set; equals `h_gradient_tangent` when
    /// the equilibrium is interior.
    pub max_tangent_gradient_team: f64,
    pub team_points: Vec<FlowProfile>,
    pub ne_points: Vec<FlowProfile>,
    /// Sampled sets are estimates of the true solution sets.
    pub sampled: bool,
}

/// Solution-set distance bound. `eta = None` picks the tightest value for
/// which the premise `H(gradient images) < eta` holds.
pub fn theorem2_report(
    net: &Network,
    cm: &CostModel,
    cfg: &SolverConfig,
    eta: Option<f64>,
) -> Result<HausdorffReport> {
    if let Some(e) = eta {
        if e.is_nan() || e <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "eta must be positive, got {e}"
            )));
        }
    }
    let kappa2 = strong_monotonicity_constant(net, cm, Operator::Game)?;
    let team = multi_start(net, cm, Operator::Team, cfg)?;
    let ne = multi_start(net, cm, Operator::Game, cfg)?;
    let image = |pts: &[FlowProfile]| -> Result<Vec<GradientVector>> {
        pts.iter()
            .map(|u| cost::pseudo_gradient(net, cm, u))
            .collect()
    };
    let img_team = image(&team.points)?;
    let img_ne = image(&ne.points)?;
    let tan = |v: &[GradientVector]| -> Vec<Vec<f64>> {
        v.iter()
            .map(|g| tangent_component(g).into_values())
            .collect()
    };
    let h_strategy = hausdorff(&as_vectors(&team.points), &as_vectors(&ne.points))?;
    let h_gradient = hausdorff(&as_vectors(&img_team), &as_vectors(&img_ne))?;
    let h_gradient_tangent = hausdorff(&tan(&img_team), &tan(&img_ne))?;
    let eta = eta.unwrap_or(h_gradient * (1.0 + 1e-9) + 1e-12);
    let bound = (kappa2 > 0.0).then(|| eta / kappa2);
    let premise_holds = h_gradient < eta;
    let bound_satisfied = match bound {
        Some(b) => !premise_holds || h_strategy < b,
        None => false,
    };

    let mut min_slack = f64::INFINITY;
    for (u, fu) in team.points.iter().zip(&img_team) {
        for (v, fv) in ne.points.iter().zip(&img_ne) {
            let slack = fu.distance(fv) + 1e-9 - kappa2 * u.distance(v);
            min_slack = min_slack.min(slack);
        }
    }
    let ne_interior = ne
        .points
        .iter()
        .all(|u| u.as_slice().iter().all(|&x| x >= INTERIOR_TOL));
    let max_tangent_gradient_team = img_team
        .iter()
        .map(|g| tangent_component(g).norm())
        .fold(0.0, f64::max);

    Ok(HausdorffReport {
        h_strategy,
        h_gradient,
        h_gradient_tangent,
        eta,
        kappa2,
        bound,
        premise_holds,
        bound_satisfied,
        pointwise_ok: min_slack >= 0.0,
        min_pointwise_slack: min_slack,
        ne_interior,
        max_tangent_gradient_team,
        team_points: team.points,
        ne_points: ne.points,
        sampled: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub game: Operator,
    pub tol: f64,
    /// Largest game-VI residual over the sampled team optima.
    pub max_game_residual_at_team: f64,
    /// Largest team-VI residual over the sampled equilibria.
    pub max_team_residual_at_ne: f64,
    pub cost_spread: f64,
    pub hausdorff: f64,
    pub team_optima_are_ne: bool,
    pub ne_are_team_optimal: bool,
    pub cost_constant: bool,
    pub passes: bool,
    pub team_points: Vec<FlowProfile>,
    pub ne_points: Vec<FlowProfile>,
}

/// Tolerance on the team-cost spread across the sampled sets.
pub const COST_SPREAD_TOL: f64 = 1e-6;

/// Cross-check team optima against the equilibria of `game`.
pub fn coincidence_certificate(
    net: &Network,
    cm: &CostModel,
    cfg: &SolverConfig,
    game: Operator,
    tol: f64,
) -> Result<CoincidenceReport> {
    if game == Operator::Team {
        return Err(Error::InvalidArgument(
            "the certificate compares the team problem against a game".into(),
        ));
    }
    let team = multi_start(net, cm, Operator::Team, cfg)?;
    let ne = multi_start(net, cm, game, cfg)?;
    let max_res = |op: Operator, pts: &[FlowProfile]| -> Result<f64> {
        pts.iter()
            .map(|u| solver::vi_residual(net, cm, op, u))
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
    };
    let max_game_residual_at_team = max_res(game, &team.points)?;
    let max_team_residual_at_ne = max_res(Operator::Team, &ne.points)?;
    let costs: Vec<f64> = team
        .points
        .iter()
        .chain(&ne.points)
        .map(|u| cost::team_cost(net, cm, u))
        .collect::<Result<_>>()?;
    let cost_spread = costs.iter().cloned().fold(f64::MIN, f64::max)
        - costs.iter().cloned().fold(f64::MAX, f64::min);
    let h = hausdorff(&as_vectors(&team.points), &as_vectors(&ne.points))?;
    let team_optima_are_ne = max_game_residual_at_team <= tol;
    let ne_are_team_optimal = max_team_residual_at_ne <= tol;
    let cost_constant = cost_spread <= COST_SPREAD_TOL;
    Ok(CoincidenceReport {
        game,
        tol,
        max_game_residual_at_team,
        max_team_residual_at_ne,
        cost_spread,
        hausdorff: h,
        team_optima_are_ne,
        ne_are_team_optimal,
        cost_constant,
        passes: team_optima_are_ne && ne_are_team_optimal && cost_constant,
        team_points: team.points,
        ne_points: ne.points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub game: Operator,
    /// 0-based source index.
    pub deviator: usize,
    pub team: f64,
    pub mixed: f64,
    pub ne: f64,
    /// The deviator's own payoff at the team optimum and at the equilibrium.
    pub deviator_payoff_team: f64,
    pub deviator_payoff_ne: f64,
    pub team_profile: FlowProfile,
    pub ne_profile: FlowProfile,
    pub mixed_profile: FlowProfile,
}

fn payoff(net: &Network, cm: &CostModel, game: Operator, i: usize, u: &FlowProfile) -> Result<f64> {
    match game {
        Operator::Game => cost::individual_cost(net, cm, i, u),
        Operator::Potential => cost::potential_payoff(net, cm, i, u),
        Operator::Team => cost::team_cost(net, cm, u),
    }
}

/// Team cost at the team optimum, at the profile where only `deviator`
/// switches to its equilibrium block, and at the equilibrium.
pub fn strategy_profile_cost_table(
    net: &Network,
    cm: &CostModel,
    cfg: &SolverConfig,
    game: Operator,
    deviator: usize,
) -> Result<CostTable> {
    net.check_source(deviator)?;
    let team = solve_converged(net, cm, Operator::Team, cfg)?;
    let ne = solve_converged(net, cm, game, cfg)?;
    cost_table_from(net, cm, game, deviator, team.profile, ne.profile)
}

/// Cost table for given team and equilibrium profiles.
pub fn cost_table_from(
    net: &Network,
    cm: &CostModel,
    game: Operator,
    deviator: usize,
    team: FlowProfile,
    ne: FlowProfile,
) -> Result<CostTable> {
    net.check_source(deviator)?;
    let mixed = team.with_block(deviator, ne.block(deviator));
    Ok(CostTable {
        game,
        deviator,
        team: cost::team_cost(net, cm, &team)?,
        mixed: cost::team_cost(net, cm, &mixed)?,
        ne: cost::team_cost(net, cm, &ne)?,
        deviator_payoff_team: payoff(net, cm, game, deviator, &team)?,
        deviator_payoff_ne: payoff(net, cm, game, deviator, &ne)?,
        team_profile: team,
        ne_profile: ne,
        mixed_profile: mixed,
    })
}

/// Norm of the operator difference at two points (helper for reports).
pub fn operator_gap(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    u: &FlowProfile,
    v: &FlowProfile,
) -> Result<f64> {
    let a = cost::evaluate(net, cm, op, u)?;
    let b = cost::evaluate(net, cm, op, v)?;
    Ok(norm(a.sub(&b).as_slice()))
}
