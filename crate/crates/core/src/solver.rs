//! Discretized projected dynamics for team optima and equilibria.
//!
//! Forward Euler on
//!
//! ```text
//! y' = -T(u) + u - y,    u = Proj(y)
//! ```
//!
//! with `T` one of the three operators. A fixed point satisfies
//! `u = Proj(u - T(u))`, so the natural-map residual `|u - Proj(u - T(u))|`
//! is both the stopping rule and the optimality certificate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{self, CostModel, Operator};
use crate::error::{Error, Result};
use crate::network::{distance, FlowProfile, Network};
use crate::projection::project_profile_raw;

/// Iterations without a 0.1% improvement of the best residual before the
/// step is declared unstable.
const STALL_WINDOW: usize = 20_000;

fn default_step() -> f64 {
    0.05
}
fn default_max_iters() -> usize {
    200_000
}
fn default_tol() -> f64 {
    1e-8
}
fn default_starts() -> usize {
    8
}
fn default_halvings() -> u32 {
    4
}
fn default_dedup() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub step_size: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub seed: u64,
    pub num_starts: usize,
    /// Step halvings attempted after an unstable run.
    pub max_halvings: u32,
    pub dedup_tol: f64,
    /// Record `(iter, cost, residual)` every this many iterations; 0 disables.
    pub log_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step_size: default_step(),
            max_iters: default_max_iters(),
            residual_tol: default_tol(),
            seed: 0,
            num_starts: default_starts(),
            max_halvings: default_halvings(),
            dedup_tol: default_dedup(),
            log_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "step_size must lie in (0, 1], got {}",
                self.step_size
            )));
        }
        if self.residual_tol.is_nan() || self.residual_tol <= 0.0 {
            return Err(Error::InvalidArgument(
                "residual_tol must be positive".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if self.num_starts == 0 {
            return Err(Error::InvalidArgument("num_starts must be positive".into()));
        }
        if self.dedup_tol.is_nan() || self.dedup_tol <= 0.0 {
            return Err(Error::InvalidArgument("dedup_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iter: usize,
    pub cost: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub profile: FlowProfile,
    pub cost: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Step size of the final attempt.
    pub step_size: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl SolveResult {
    /// Trajectory log as CSV with columns `iter,cost,residual`.
    pub fn trajectory_csv(&self) -> Option<String> {
        let traj = self.trajectory.as_ref()?;
        let mut out = String::from("iter,cost,residual\n");
        for p in traj {
            out.push_str(&format!("{},{},{}\n", p.iter, p.cost, p.residual));
        }
        Some(out)
    }
}

/// Deduplicated sample of a solution set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub points: Vec<FlowProfile>,
    pub dedup_tol: f64,
    pub runs: usize,
    pub converged_runs: usize,
}

enum Outcome {
    Converged,
    Stalled,
    Blown,
    Exhausted,
}

struct Run {
    u: Vec<f64>,
    residual: f64,
    iterations: usize,
    outcome: Outcome,
    trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Reusable evaluation buffers for one trajectory.
struct Workspace<'a> {
    net: &'a Network,
    cm: &'a CostModel,
    op: Operator,
    t: Vec<f64>,
    tmp: Vec<f64>,
    proj: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn new(net: &'a Network, cm: &'a CostModel, op: Operator) -> Self {
        let n = net.total_paths();
        Self {
            net,
            cm,
            op,
            t: vec![0.0; n],
            tmp: vec![0.0; n],
            proj: vec![0.0; n],
        }
    }

    /// Evaluates `T(u)` into `self.t` and returns the natural residual.
    fn residual(&mut self, u: &[f64]) -> f64 {
        cost::apply_raw(self.net, self.cm, self.op, u, &mut self.t);
        for ((d, x), g) in self.tmp.iter_mut().zip(u).zip(&self.t) {
            *d = x - g;
        }
        project_profile_raw(self.net, &self.tmp, &mut self.proj);
        distance(u, &self.proj)
    }
}

fn run_dynamics(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    cfg: &SolverConfig,
    init: &[f64],
    h: f64,
    mut on_iterate: impl FnMut(usize, &[f64]),
) -> Run {
    let mut ws = Workspace::new(net, cm, op);
    let mut u = init.to_vec();
    let mut y = init.to_vec();
    let mut best = f64::INFINITY;
    let mut last_improvement = 0;
    let mut initial = None;
    let mut trajectory = (cfg.log_every > 0).then(Vec::new);

    for iter in 0..=cfg.max_iters {
        let residual = ws.residual(&u);
        on_iterate(iter, &u);
        let r0 = *initial.get_or_insert(residual);
        if let Some(tr) = trajectory.as_mut() {
            if iter % cfg.log_every == 0 || residual <= cfg.residual_tol {
                tr.push(TrajectoryPoint {
                    iter,
                    cost: cost::team_cost_raw(net, cm, &u),
                    residual,
                });
            }
        }
        let finish = |outcome, u: Vec<f64>, trajectory| Run {
            u,
            residual,
            iterations: iter,
            outcome,
            trajectory,
        };
        if !residual.is_finite() || residual > 1e8 * (1.0 + r0) {
            return finish(Outcome::Blown, u, trajectory);
        }
        if residual <= cfg.residual_tol {
            return finish(Outcome::Converged, u, trajectory);
        }
        if iter == cfg.max_iters {
            return finish(Outcome::Exhausted, u, trajectory);
        }
        if residual < 0.999 * best {
            best = residual;
            last_improvement = iter;
        } else if iter - last_improvement > STALL_WINDOW {
            return finish(Outcome::Stalled, u, trajectory);
        }
        for ((yk, &uk), &tk) in y.iter_mut().zip(&u).zip(&ws.t) {
            *yk += h * (uk - tk - *yk);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return finish(Outcome::Blown, u, trajectory);
        }
        project_profile_raw(net, &y, &mut u);
    }
    unreachable!("loop returns on the last iteration")
}

/// Run the projected dynamics from `init` with the requested operator.
///
/// An unstable step (blow-up, or a residual that stops improving) is halved
/// and the run restarted, up to `cfg.max_halvings` times. Running out of
/// iterations is reported through `converged = false`.
pub fn solve_dynamics(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    cfg: &SolverConfig,
    init: &FlowProfile,
) -> Result<SolveResult> {
    solve_dynamics_observed(net, cm, op, cfg, init, |_, _, _| {})
}

/// [`solve_dynamics`] that reports every iterate as `(step, iter, u)`. A
/// restart after halving begins again at `iter = 0` with the smaller step.
pub fn solve_dynamics_observed(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    cfg: &SolverConfig,
    init: &FlowProfile,
    mut observer: impl FnMut(f64, usize, &[f64]),
) -> Result<SolveResult> {
    cfg.validate()?;
    cm.check_network(net)?;
    net.check_dims(init)?;
    if !net.validate_profile(init, 1e-9) {
        return Err(Error::InvalidArgument(
            "initial profile is infeasible".into(),
        ));
    }
    let mut h = cfg.step_size;
    let mut attempt = 0;
    loop {
        let run = run_dynamics(net, cm, op, cfg, init.as_slice(), h, |i, u| {
            observer(h, i, u)
        });
        let retry = matches!(run.outcome, Outcome::Stalled | Outcome::Blown);
        if retry && attempt < cfg.max_halvings {
            attempt += 1;
            h *= 0.5;
            continue;
        }
        if matches!(run.outcome, Outcome::Blown) {
            return Err(Error::Divergence { step_size: h });
        }
        let cost = cost::team_cost_raw(net, cm, &run.u);
        return Ok(SolveResult {
            profile: net.profile(run.u)?,
            cost,
            residual: run.residual,
            iterations: run.iterations,
            converged: matches!(run.outcome, Outcome::Converged),
            step_size: h,
            trajectory: run.trajectory,
        });
    }
}

/// Natural-map residual `|u - Proj(u - T(u))|`; zero exactly at VI solutions.
pub fn vi_residual(net: &Network, cm: &CostModel, op: Operator, u: &FlowProfile) -> Result<f64> {
    cm.check_network(net)?;
    net.check_dims(u)?;
    let mut ws = Workspace::new(net, cm, op);
    Ok(ws.residual(u.as_slice()))
}

/// Per-source residuals; each block is one player's own VI certificate.
pub fn block_residuals(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    u: &FlowProfile,
) -> Result<Vec<f64>> {
    cm.check_network(net)?;
    net.check_dims(u)?;
    let mut ws = Workspace::new(net, cm, op);
    ws.residual(u.as_slice());
    let offs = net.offsets();
    Ok((0..net.num_sources())
        .map(|i| {
            distance(
                &u.as_slice()[offs[i]..offs[i + 1]],
                &ws.proj[offs[i]..offs[i + 1]],
            )
        })
        .collect())
}

/// Uniform sample on the product of scaled simplices (normalized exponential
/// variates per block).
pub fn random_profile<R: rand::Rng + ?Sized>(net: &Network, rng: &mut R) -> FlowProfile {
    let mut u = net.zeros();
    for i in 0..net.num_sources() {
        let r = net.demand(i);
        let block = u.block_mut(i);
        for x in block.iter_mut() {
            *x = Exp1.sample(rng);
        }
        let s: f64 = block.iter().sum();
        for x in block.iter_mut() {
            *x *= r / s;
        }
    }
    u
}

/// Reproducible RNG stream for start `index` under `seed`.
pub fn start_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Solve from `cfg.num_starts` seeded random feasible points and keep the
/// distinct converged profiles.
pub fn multi_start(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    cfg: &SolverConfig,
) -> Result<SolutionSet> {
    cfg.validate()?;
    let runs: Vec<Result<SolveResult>> = (0..cfg.num_starts)
        .into_par_iter()
        .map(|s| {
            let init = random_profile(net, &mut start_rng(cfg.seed, s as u64));
            solve_dynamics(net, cm, op, cfg, &init)
        })
        .collect();
    let mut points = Vec::new();
    for run in runs {
        match run {
            Ok(r) if r.converged => points.push(r.profile),
            Ok(_) | Err(Error::Divergence { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(Error::NoConvergedRuns {
            starts: cfg.num_starts,
        });
    }
    let converged_runs = points.len();
    Ok(SolutionSet {
        points: dedup_points(points, cfg.dedup_tol),
        dedup_tol: cfg.dedup_tol,
        runs: cfg.num_starts,
        converged_runs,
    })
}

/// Canonical (lexicographic) order, then greedy removal of points closer
/// than `tol` to an already-kept one.
pub fn dedup_points(mut points: Vec<FlowProfile>, tol: f64) -> Vec<FlowProfile> {
    points.sort_by(|a, b| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<FlowProfile> = Vec::new();
    for p in points {
        if kept.iter().all(|q| q.distance(&p) >= tol) {
            kept.push(p);
        }
    }
    kept
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub step_size: f64,
    pub iterations: usize,
    /// `V_t = |u_t - u*|^2 / 2` along the trajectory.
    pub values: Vec<f64>,
    pub increases: usize,
    pub increase_fraction: f64,
    /// `exp(slope)` of a least-squares fit of `ln V_t` against `t`.
    pub decay_factor: Option<f64>,
    pub monotone: bool,
}

/// Track `V(u) = |u - u*|^2 / 2` along the discrete trajectory from `init`.
///
/// The step follows the same halving policy as [`solve_dynamics`]. The
/// reference should be solved to a tighter tolerance than `cfg.residual_tol`
/// so that its own error does not show up in `V` before the run stops.
pub fn lyapunov_decay_check(
    net: &Network,
    cm: &CostModel,
    op: Operator,
    cfg: &SolverConfig,
    init: &FlowProfile,
    reference: &SolveResult,
) -> Result<DecayReport> {
    if !reference.converged {
        return Err(Error::NotConverged(
            "reference solution for the decay check".into(),
        ));
    }
    cfg.validate()?;
    cm.check_network(net)?;
    net.check_dims(init)?;
    net.check_dims(&reference.profile)?;
    let target = reference.profile.as_slice();
    let mut h = cfg.step_size;
    let mut attempt = 0;
    loop {
        let mut values = Vec::new();
        let run = run_dynamics(net, cm, op, cfg, init.as_slice(), h, |_, u| {
            let d = distance(u, target);
            values.push(0.5 * d * d);
        });
        let retry = matches!(run.outcome, Outcome::Stalled | Outcome::Blown);
        if retry && attempt < cfg.max_halvings {
            attempt += 1;
            h *= 0.5;
            continue;
        }
        if matches!(run.outcome, Outcome::Blown) {
            return Err(Error::Divergence { step_size: h });
        }
        let increases = values
            .windows(2)
            .filter(|w| w[1] > w[0] * (1.0 + 1e-9) + 1e-24)
            .count();
        let steps = values.len().saturating_sub(1);
        return Ok(DecayReport {
            step_size: h,
            iterations: run.iterations,
            increase_fraction: if steps == 0 {
                0.0
            } else {
                increases as f64 / steps as f64
            },
            monotone: increases == 0,
            increases,
            decay_factor: log_linear_factor(&values),
            values,
        });
    }
}

fn log_linear_factor(values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(t, &v)| (t as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, NetworkSpec, PathSpec, SourceSpec};

    fn parallel(rho: Vec<f64>, paths: usize) -> (Network, CostModel) {
        let net = build_network(&NetworkSpec {
            nodes: 2,
            edges: vec![[1, 2]; paths],
            sources: vec![SourceSpec {
                node: 1,
                demand: 2.0,
            }],
            paths: vec![(1..=paths)
                .map(|e| PathSpec::Edges { edges: vec![e] })
                .collect()],
        })
        .unwrap();
        (net, CostModel::with_rho(rho).unwrap())
    }

    #[test]
    fn toy_team_optimum() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let r = solve_dynamics(
            &net,
            &cm,
            Operator::Team,
            &SolverConfig::default(),
            &net.uniform_profile(),
        )
        .unwrap();
        assert!(r.converged);
        assert!(r.residual <= 1e-8);
        assert!((r.profile.as_slice()[0] - 1.5).abs() < 1e-6);
        assert!((r.profile.as_slice()[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn symmetric_toy_every_operator() {
        let (net, cm) = parallel(vec![1.0, 1.0], 2);
        let init = net.profile(vec![1.8, 0.2]).unwrap();
        for op in [Operator::Team, Operator::Game, Operator::Potential] {
            let r = solve_dynamics(&net, &cm, op, &SolverConfig::default(), &init).unwrap();
            assert!(r.converged);
            assert!((r.profile.as_slice()[0] - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn residual_examples() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let r = solve_dynamics(
            &net,
            &cm,
            Operator::Team,
            &SolverConfig::default(),
            &net.uniform_profile(),
        )
        .unwrap();
        assert!(vi_residual(&net, &cm, Operator::Team, &r.profile).unwrap() < 1e-8);
        let even = net.uniform_profile();
        assert!(vi_residual(&net, &cm, Operator::Team, &even).unwrap() > 0.1);
        // interior point where the operator vanishes
        let (net, cm) = parallel(vec![1.0, 1.0], 2);
        let u = net.uniform_profile();
        assert_eq!(vi_residual(&net, &cm, Operator::Team, &u).unwrap(), 0.0);
    }

    #[test]
    fn rejects_infeasible_init_and_bad_config() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let bad = net.profile(vec![3.0, 0.0]).unwrap();
        assert!(solve_dynamics(&net, &cm, Operator::Team, &SolverConfig::default(), &bad).is_err());
        let cfg = SolverConfig {
            step_size: 1.5,
            ..SolverConfig::default()
        };
        assert!(solve_dynamics(&net, &cm, Operator::Team, &cfg, &net.uniform_profile()).is_err());
    }

    #[test]
    fn exhausted_iterations_are_reported() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let cfg = SolverConfig {
            max_iters: 3,
            ..SolverConfig::default()
        };
        let r = solve_dynamics(&net, &cm, Operator::Team, &cfg, &net.uniform_profile()).unwrap();
        assert!(!r.converged);
        assert!(r.residual > cfg.residual_tol);
    }

    #[test]
    fn unstable_step_is_halved() {
        // J = diag(2 rho) = diag(120, 120): Euler needs h < 1/60
        let (net, cm) = parallel(vec![60.0, 60.0], 2);
        let init = net.profile(vec![2.0, 0.0]).unwrap();
        let r = solve_dynamics(&net, &cm, Operator::Team, &SolverConfig::default(), &init).unwrap();
        assert!(r.converged);
        assert!(r.step_size < 0.05);
    }

    #[test]
    fn redundant_paths_give_a_face_of_optima() {
        // paths 1 and 2 both use edge 1: any split between them is optimal
        let net = build_network(&NetworkSpec {
            nodes: 2,
            edges: vec![[1, 2]; 2],
            sources: vec![SourceSpec {
                node: 1,
                demand: 2.0,
            }],
            paths: vec![vec![
                PathSpec::Edges { edges: vec![1] },
                PathSpec::Edges { edges: vec![1] },
                PathSpec::Edges { edges: vec![2] },
            ]],
        })
        .unwrap();
        let cm = CostModel::with_rho(vec![1.0, 3.0]).unwrap();
        let cfg = SolverConfig {
            num_starts: 12,
            ..SolverConfig::default()
        };
        let set = multi_start(&net, &cm, Operator::Team, &cfg).unwrap();
        assert!(set.points.len() >= 2);
        let costs: Vec<f64> = set
            .points
            .iter()
            .map(|p| cost::team_cost(&net, &cm, p).unwrap())
            .collect();
        let spread = costs.iter().cloned().fold(f64::MIN, f64::max)
            - costs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-8);
    }

    #[test]
    fn strongly_monotone_instance_has_one_point() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let cfg = SolverConfig {
            num_starts: 10,
            ..SolverConfig::default()
        };
        let set = multi_start(&net, &cm, Operator::Team, &cfg).unwrap();
        assert_eq!(set.points.len(), 1);
        let cfg = SolverConfig {
            num_starts: 1,
            ..cfg
        };
        assert_eq!(
            multi_start(&net, &cm, Operator::Team, &cfg)
                .unwrap()
                .points
                .len(),
            1
        );
    }

    #[test]
    fn multi_start_is_deterministic() {
        let (net, cm) = parallel(vec![1.0, 1.0, 3.0], 3);
        let cfg = SolverConfig {
            num_starts: 6,
            seed: 42,
            ..SolverConfig::default()
        };
        let a = multi_start(&net, &cm, Operator::Team, &cfg).unwrap();
        let b = multi_start(&net, &cm, Operator::Team, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decay_on_toy_and_at_the_reference() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let tight = SolverConfig {
            residual_tol: 1e-13,
            ..SolverConfig::default()
        };
        let init = net.profile(vec![0.0, 2.0]).unwrap();
        let reference = solve_dynamics(&net, &cm, Operator::Team, &tight, &init).unwrap();
        let cfg = SolverConfig {
            step_size: 0.1,
            ..SolverConfig::default()
        };
        let rep = lyapunov_decay_check(&net, &cm, Operator::Team, &cfg, &init, &reference).unwrap();
        assert!(rep.monotone, "{:?}", rep.values);
        assert!(rep.decay_factor.unwrap() < 1.0);

        let at = lyapunov_decay_check(
            &net,
            &cm,
            Operator::Team,
            &cfg,
            &reference.profile,
            &reference,
        )
        .unwrap();
        assert!(at.values.iter().all(|&v| v == 0.0));
        assert!(at.monotone);
    }

    #[test]
    fn decay_needs_converged_reference() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let cfg = SolverConfig {
            max_iters: 2,
            ..SolverConfig::default()
        };
        let r = solve_dynamics(&net, &cm, Operator::Team, &cfg, &net.uniform_profile()).unwrap();
        assert!(matches!(
            lyapunov_decay_check(&net, &cm, Operator::Team, &cfg, &net.uniform_profile(), &r),
            Err(Error::NotConverged(_))
        ));
    }

    #[test]
    fn trajectory_log_csv() {
        let (net, cm) = parallel(vec![1.0, 3.0], 2);
        let cfg = SolverConfig {
            log_every: 10,
            ..SolverConfig::default()
        };
        let r = solve_dynamics(&net, &cm, Operator::Team, &cfg, &net.uniform_profile()).unwrap();
        let csv = r.trajectory_csv().unwrap();
        assert!(csv.starts_with("iter,cost,residual\n0,"));
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with(&format!("{},", r.iterations)));
    }

    #[test]
    fn dedup_keeps_separated_points() {
        let p = |v: Vec<f64>| FlowProfile::from_blocks(vec![v]);
        let pts = vec![
            p(vec![1.0, 1.0]),
            p(vec![1.0 + 1e-6, 1.0 - 1e-6]),
            p(vec![0.0, 2.0]),
        ];
        let kept = dedup_points(pts, 1e-4);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].as_slice(), &[0.0, 2.0]);
    }
}
