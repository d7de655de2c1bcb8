use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hzplan::kernel::RngStream;
use hzplan::sets::complexity;
use hzplan::solver::{admm_fp, warm_start_from_point};
use hzplan::unions::UnionKind;
use hzplan::SolverParams;
use hzplan_bench::io::{self, IoError, ProblemFile, ResultFile, RunRow};
use hzplan_bench::scenarios::random_milp::{batch_instance, MilpConfig};
use hzplan_bench::scenarios::{behavior, reach_avoid, two_equilibrium};
use hzplan_bench::verify;

#[derive(Parser)]
#[command(name = "hzplan", version, about = "Hybrid-zonotope planning benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnionArg {
    Sharp,
    Condensed,
    Zonotope,
}

impl From<UnionArg> for UnionKind {
    fn from(u: UnionArg) -> Self {
        match u {
            UnionArg::Sharp => UnionKind::Sharp,
            UnionArg::Condensed => UnionKind::Condensed,
            UnionArg::Zonotope => UnionKind::Zonotope,
        }
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "eps-p")]
    eps_p: Option<f64>,
    /// Time limit per solve, in seconds.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
}

impl SolverArgs {
    fn apply(&self, mut p: SolverParams) -> SolverParams {
        p.seed = self.seed;
        if let Some(r) = self.rho {
            p.rho = r;
        }
        if let Some(e) = self.eps_p {
            p.eps_p = e;
        }
        if let Some(t) = self.t_max {
            p.t_max = Some(Duration::from_secs_f64(t));
        }
        p
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reachable or lifted sets of the two-equilibrium system.
    TwoEquilibrium {
        #[arg(long, default_value_t = 15)]
        steps: usize,
        #[arg(long, value_enum, default_value = "condensed")]
        union: UnionArg,
        /// Build the lifted set instead of the reachable set.
        #[arg(long)]
        lifted: bool,
        /// Restrict every successor state to the state bound.
        #[arg(long)]
        constrained: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Random mixed-integer feasibility instances.
    RandomMilp {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long = "n-gc", default_value_t = 40)]
        n_gc: usize,
        #[arg(long = "n-gb", default_value_t = 10)]
        n_gb: usize,
        #[arg(long = "n-c", default_value_t = 10)]
        n_c: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Double-integrator reach-avoid planning.
    ReachAvoid {
        /// Sampling factor: Δt = 2/f_s, N = 10 f_s.
        #[arg(long = "fs", default_value_t = 1)]
        f_s: usize,
        /// Remove all obstacles.
        #[arg(long)]
        open: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Two-lane behavior and motion planning.
    BehaviorPlanning {
        /// Scenario seed; the fixed scenario is used when absent.
        #[arg(long)]
        scenario: Option<u64>,
        /// Prior plan (trajectory JSON or array) used as warm-start point.
        #[arg(long = "warm-start")]
        warm_start: Option<PathBuf>,
        /// Standard deviation of Gaussian noise added to the warm-start point.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Solve a problem file.
    Solve {
        problem: PathBuf,
        /// Warm-start point in set space (trajectory JSON or array).
        #[arg(long = "warm-start")]
        warm_start: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] hzplan::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(IoError::Parse { .. }) | CliError::Io(IoError::Invalid { .. }) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::Io { path: dir.to_path_buf(), source }.into())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::TwoEquilibrium { steps, union, lifted, constrained, out } => {
            if steps == 0 {
                return Err(CliError::Usage("--steps must be at least 1".into()));
            }
            ensure_dir(&out)?;
            let set = two_equilibrium::build(steps, union.into(), lifted, constrained)?;
            let cx = complexity(&set);
            let label = format!("{}{steps}", if lifted { "Z" } else { "X" });
            println!("{label}: {cx}");
            io::write_json(&out.join("set.json"), &ProblemFile::from_set(&set, None))?;
            io::write_complexity(&out.join("complexity.csv"), &[(label, cx)])?;
        }
        Command::RandomMilp { count, n, n_gc, n_gb, n_c, density, solver, out } => {
            if count == 0 || n == 0 || !(0.0..=1.0).contains(&density) {
                return Err(CliError::Usage("counts must be positive and density in [0, 1]".into()));
            }
            ensure_dir(&out)?;
            let cfg = MilpConfig { n, n_gc, n_gb, n_c, density };
            let mut rows = Vec::with_capacity(count);
            let mut ok = 0;
            for i in 0..count {
                let (inst, seed) = batch_instance(&cfg, solver.seed, i);
                let params = SolverArgs { seed, ..solver.clone() }.apply(SolverParams::default());
                let r = admm_fp(&inst.z, &inst.p, &inst.q, &params, None)?;
                let verified = r.converged() && verify::check_factors(&inst.z, &r.xi, &r.zeta).passes(verify::FACTOR_TOL);
                ok += usize::from(verified);
                rows.push(RunRow::new(format!("milp-{i:03}"), seed, &r, verified));
            }
            io::write_report(&out.join("report.csv"), &rows)?;
            println!("{ok}/{count} converged and verified");
        }
        Command::ReachAvoid { f_s, open, solver, out } => {
            if f_s == 0 {
                return Err(CliError::Usage("--fs must be at least 1".into()));
            }
            ensure_dir(&out)?;
            let ra = if open {
                reach_avoid::build(f_s, reach_avoid::FreeSpace::open())?
            } else {
                reach_avoid::random(f_s, solver.seed)?
            };
            let params = solver.apply(SolverParams { t_max: Some(Duration::from_secs(5)), ..SolverParams::default() });
            let pr = &ra.problem;
            let r = admm_fp(&pr.z, &pr.p, &pr.q, &params, None)?;
            let check = verify::check_reach_avoid(&ra, &r.z, 1e-3);
            let verified = r.converged() && check.passes(1e-3);
            io::write_json(&out.join("trajectory.json"), &io::trajectory(&pr.layout, &r.z))?;
            io::write_json(&out.join("free_space.json"), &ra.free_space.boxes)?;
            io::write_report(&out.join("report.csv"), &[RunRow::new(format!("reach-avoid-fs{f_s}"), params.seed, &r, verified)])?;
            println!("{} in {} iterations, dynamics residual {:.2e}, verified {verified}", r.status, r.iterations, check.dynamics_residual);
        }
        Command::BehaviorPlanning { scenario, warm_start, perturb, solver, out } => {
            ensure_dir(&out)?;
            let sc = scenario.map_or_else(behavior::Scenario::fixed, behavior::Scenario::random);
            let bh = behavior::build(sc)?;
            let params = solver.apply(behavior::solver_params(solver.seed));
            let pr = &bh.problem;
            let init = match warm_start {
                Some(path) => {
                    let mut point = io::load_point(&path)?;
                    if point.len() != pr.z.dim() {
                        return Err(CliError::Usage(format!("warm-start point has {} entries, expected {}", point.len(), pr.z.dim())));
                    }
                    let mut rng = RngStream::new(params.seed);
                    point.iter_mut().for_each(|v| *v += rng.normal(0.0, perturb));
                    Some(warm_start_from_point(&pr.z, &point, &params)?)
                }
                None => None,
            };
            let r = admm_fp(&pr.z, &pr.p, &pr.q, &params, init)?;
            let check = verify::check_behavior(&bh, &r.z, 0.02);
            let verified = r.converged() && check.passes(0.02);
            io::write_json(&out.join("trajectory.json"), &io::trajectory(&pr.layout, &r.z))?;
            io::write_json(&out.join("scenario.json"), &bh.scenario)?;
            let id = scenario.map_or("behavior-fixed".to_string(), |s| format!("behavior-{s}"));
            io::write_report(&out.join("report.csv"), &[RunRow::new(id, params.seed, &r, verified)])?;
            println!("{} in {} iterations, verified {verified}", r.status, r.iterations);
        }
        Command::Solve { problem, warm_start, solver, out } => {
            let (pf, z) = io::load_problem(&problem)?;
            let (p, q) = pf.cost().map_err(CliError::Model)?;
            ensure_dir(&out)?;
            let params = solver.apply(SolverParams::default());
            let init = match warm_start {
                Some(path) => Some(warm_start_from_point(&z, &io::load_point(&path)?, &params)?),
                None => None,
            };
            let r = admm_fp(&z, &p, &q, &params, init)?;
            let verified = r.converged() && verify::check_factors(&z, &r.xi, &r.zeta).passes(verify::FACTOR_TOL);
            io::write_json(&out.join("result.json"), &ResultFile::from(&r))?;
            let id = problem.file_stem().map_or("problem".into(), |s| s.to_string_lossy().into_owned());
            io::write_report(&out.join("report.csv"), &[RunRow::new(id, params.seed, &r, verified)])?;
            println!("{} in {} iterations, objective {}", r.status, r.iterations, r.objective);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
