use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use teamflow::analysis::{deviation_csv, strong_monotonicity_constant, theorem2_report};
use teamflow::reproduce::{self, deviation_report, sweep, sweep_csv};
use teamflow::scenario::{self, Scenario};
use teamflow::{multi_start, solve_dynamics, Error, Operator};

const EXIT_INPUT: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;
const EXIT_CLAIM: u8 = 4;

#[derive(Parser)]
#[command(
    name = "teamflow",
    version,
    about = "Team optima and equilibria of shared-network routing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Team,
    Ne,
    Potential,
}

impl From<Mode> for Operator {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Team => Operator::Team,
            Mode::Ne => Operator::Game,
            Mode::Potential => Operator::Potential,
        }
    }
}

/// Overrides shared by the solver-backed verbs.
#[derive(clap::Args)]
struct RunOpts {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
}

impl RunOpts {
    fn apply(&self, sc: &mut Scenario) {
        if let Some(seed) = self.seed {
            sc.solver.seed = seed;
        }
        if let Some(n) = self.starts {
            sc.analysis.num_starts = Some(n);
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem from the uniform profile, or sample its solution set
    /// with `--starts`.
    Solve {
        /// Scenario file, or `bundled:<name>`.
        scenario: String,
        #[arg(long, value_enum, default_value = "team")]
        mode: Mode,
        #[command(flatten)]
        run: RunOpts,
        /// Also record the (iteration, cost, residual) trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deviation bound between team optimum and equilibrium. `--out x.json`
    /// also writes `x.csv`.
    Deviation {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        run: RunOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff distances between sampled solution sets.
    Hausdorff {
        scenario: String,
        #[arg(long)]
        eta: Option<f64>,
        #[command(flatten)]
        run: RunOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one coefficient, e.g. `--param 'rho[1]' --values 10,12,14`.
    Sweep {
        scenario: String,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        run: RunOpts,
        /// CSV output; a JSON mirror goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment suite: fig3, fig4, fig6, fig7 or all.
    Reproduce {
        suite: String,
        /// Output directory for `<suite>.json` and `<suite>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check scenario files and print their dimensions.
    Validate {
        #[arg(required = true)]
        scenarios: Vec<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Divergence { .. }
            | Error::NotConverged(_)
            | Error::NoConvergedRuns { .. }
            | Error::EmptySet => EXIT_DIVERGENCE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<u8, Failure>;

fn load(arg: &str, run: &RunOpts) -> Result<Scenario, Failure> {
    let mut sc = scenario::resolve(arg).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{arg}: {e}"),
    })?;
    run.apply(&mut sc);
    sc.validate()?;
    Ok(sc)
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn solve(
    scenario: &str,
    mode: Mode,
    run: &RunOpts,
    trajectory: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let mut sc = load(scenario, run)?;
    let (net, cm) = sc.build()?;
    let op = Operator::from(mode);
    if run.starts.is_some() {
        let set = multi_start(&net, &cm, op, &sc.solver_config())?;
        emit(out, &json(&set))?;
        return Ok(0);
    }
    if trajectory.is_some() {
        sc.solver.log_every = sc.solver.log_every.max(1);
    }
    let res = solve_dynamics(&net, &cm, op, &sc.solver, &net.uniform_profile())?;
    if let Some(p) = trajectory {
        write_atomic(p, &res.trajectory_csv().unwrap_or_default())?;
    }
    emit(out, &json(&res))?;
    Ok(if res.converged { 0 } else { EXIT_DIVERGENCE })
}

fn with_analysis(mut sc: Scenario, s: Option<f64>, q: Option<f64>) -> Result<Scenario, Failure> {
    if let Some(s) = s {
        sc.analysis.s = s;
    }
    if q.is_some() {
        sc.analysis.q = q;
    }
    sc.validate()?;
    Ok(sc)
}

fn deviation(
    scenarios: &[String],
    s: Option<f64>,
    q: Option<f64>,
    run: &RunOpts,
    out: Option<&Path>,
) -> CmdResult {
    let loaded = scenarios
        .iter()
        .map(|arg| with_analysis(load(arg, run)?, s, q))
        .collect::<Result<Vec<_>, _>>()?;
    // cases are independent; collect keeps the input order
    let reports = loaded
        .par_iter()
        .map(deviation_report)
        .collect::<teamflow::Result<Vec<_>>>()?;
    let csv = deviation_csv(&reports)?;
    match out {
        Some(p) => {
            write_atomic(p, &json(&reports))?;
            write_atomic(&p.with_extension("csv"), &csv)?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn hausdorff(scenario: &str, eta: Option<f64>, run: &RunOpts, out: Option<&Path>) -> CmdResult {
    let sc = load(scenario, run)?;
    let (net, cm) = sc.build()?;
    let rep = theorem2_report(&net, &cm, &sc.solver_config(), eta.or(sc.analysis.eta))?;
    emit(out, &json(&rep))?;
    Ok(0)
}

fn sweep_cmd(
    scenario: &str,
    param: &str,
    values: &[f64],
    s: Option<f64>,
    q: Option<f64>,
    run: &RunOpts,
    out: Option<&Path>,
) -> CmdResult {
    let sc = with_analysis(load(scenario, run)?, s, q)?;
    let rows = sweep(&sc, param, values)?;
    let csv = sweep_csv(&rows)?;
    match out {
        Some(p) => {
            write_atomic(p, &csv)?;
            write_atomic(&p.with_extension("json"), &json(&rows))?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn reproduce_cmd(suite: &str, out: Option<&Path>) -> CmdResult {
    let suites: Vec<&str> = if suite == "all" {
        reproduce::SUITES.to_vec()
    } else {
        vec![suite]
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", dir.display()),
        })?;
    }
    let mut code = 0;
    for name in suites {
        let summary = match reproduce::run_suite(name) {
            Ok(s) => s,
            Err(e @ Error::InvalidArgument(_)) => return Err(e.into()),
            Err(e) => {
                eprintln!("{name}: FAIL ({e})");
                // a failed sub-run is recorded and counts against the suite
                let failed =
                    serde_json::json!({ "suite": name, "passed": false, "error": e.to_string() });
                if let Some(dir) = out {
                    write_atomic(&dir.join(format!("{name}.json")), &json(&failed))?;
                }
                code = code.max(EXIT_DIVERGENCE);
                continue;
            }
        };
        for (scenario, mapping) in &summary.mappings {
            println!("{name}: scenario {scenario}: {mapping}");
        }
        for c in &summary.claims {
            println!(
                "{name}: {} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        if let Some(dir) = out {
            write_atomic(&dir.join(format!("{name}.json")), &json(&summary))?;
            if !summary.csv.is_empty() {
                write_atomic(&dir.join(format!("{name}.csv")), &summary.csv)?;
            }
        }
        if !summary.passed && code == 0 {
            code = EXIT_CLAIM;
        }
    }
    Ok(code)
}

fn validate(scenarios: &[String]) -> CmdResult {
    for arg in scenarios {
        let sc = load(
            arg,
            &RunOpts {
                seed: None,
                starts: None,
            },
        )?;
        let (net, cm) = sc.build()?;
        let k1 = strong_monotonicity_constant(&net, &cm, Operator::Team)?;
        let k2 = strong_monotonicity_constant(&net, &cm, Operator::Game)?;
        let paths: Vec<String> = (0..net.num_sources())
            .map(|i| net.num_paths(i).to_string())
            .collect();
        println!(
            "{arg}: ok ({} nodes, {} edges, {} DMs, paths {}, kappa1 {k1:.6}, kappa2 {k2:.6})",
            net.num_nodes(),
            net.num_edges(),
            net.num_sources(),
            paths.join("/")
        );
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve {
            scenario,
            mode,
            run,
            trajectory,
            out,
        } => solve(scenario, *mode, run, trajectory.as_deref(), out.as_deref()),
        Command::Deviation {
            scenarios,
            s,
            q,
            run,
            out,
        } => deviation(scenarios, *s, *q, run, out.as_deref()),
        Command::Hausdorff {
            scenario,
            eta,
            run,
            out,
        } => hausdorff(scenario, *eta, run, out.as_deref()),
        Command::Sweep {
            scenario,
            param,
            values,
            s,
            q,
            run,
            out,
        } => sweep_cmd(scenario, param, values, *s, *q, run, out.as_deref()),
        Command::Reproduce { suite, out } => reproduce_cmd(suite, out.as_deref()),
        Command::Validate { scenarios } => validate(scenarios),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
