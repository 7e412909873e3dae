//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use rwl_core::dalembert::build_free_profile;
use rwl_core::energetics::{exterior_generalized_energy, nonlinear_energy, utov_sides};
use rwl_core::experiments::norms::norm_table;
use rwl_core::experiments::{run_experiment, ExperimentOutput, EXPERIMENTS};
use rwl_core::nonlinear::evolve;
use rwl_core::{Params, RadialState, RunStatus};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::output::{ensure_dir, write_csv, write_experiment, write_json};

/// Column layout of `simulate.csv`.
pub const SIMULATE_COLUMNS: [&str; 6] = ["t", "E_m", "E_2_total", "nonlinear_total", "ext_E_m_R", "max_abs_w"];
/// Column layout of `linear.csv`.
pub const LINEAR_COLUMNS: [&str; 4] = ["t", "r", "w", "wt"];

#[derive(Debug, Parser)]
#[command(name = "rwl", version, about = "Radial energy-supercritical wave equation laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: `output.dir` from the config, else `rwl-out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override every experiment seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for `all` (fallback: RWL_THREADS, then the config).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Suppress progress lines.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evolve the nonlinear equation and write energy diagnostics per snapshot.
    Simulate,
    /// Evaluate the free solution by d'Alembert's formula at the configured times.
    Linear,
    /// Stationary solutions Z_ℓ and their invariants.
    Stationary,
    /// Exterior energy channel for random compact data.
    Channel,
    /// Strong Huygens localization.
    Huygens,
    /// Almost-conservation of the generalized energy.
    Conservation,
    /// Small-data linear approximation rate.
    Smalldata,
    /// Decay of the weighted exterior mass.
    ExteriorDecay,
    /// Blow-up against the ODE y'' = |y|^{p-1} y.
    BlowupOde,
    /// Hardy and U-to-V constants (plus a norm table for `norms_input.data`).
    Norms,
    /// Operator bounds for the truncation and the exterior indicator.
    OperatorBounds,
    /// Grid finite speed of propagation.
    FiniteSpeed,
    /// Free-wave exactness of the solver at dt = dr.
    LinearExactness,
    /// Every experiment.
    All,
}

impl Command {
    /// Registry name of the experiment behind the subcommand, if any.
    pub fn experiment(self) -> Option<&'static str> {
        Some(match self {
            Command::Stationary => "stationary",
            Command::Channel => "channel",
            Command::Huygens => "huygens",
            Command::Conservation => "conservation",
            Command::Smalldata => "smalldata",
            Command::ExteriorDecay => "exterior_decay",
            Command::BlowupOde => "blowup_ode",
            Command::Norms => "norms",
            Command::OperatorBounds => "operator_bounds",
            Command::FiniteSpeed => "finite_speed",
            Command::LinearExactness => "linear_exactness",
            Command::Simulate | Command::Linear | Command::All => return None,
        })
    }
}

struct Context {
    cfg: RunConfig,
    params: Params,
    out: PathBuf,
    seed: Option<u64>,
    quiet: bool,
}

impl Context {
    fn progress(&self, line: &str) {
        if !self.quiet {
            println!("{line}");
        }
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::PASS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rwl: {e}");
            e.exit_code()
        }
    }
}

fn thread_count(cli: &Cli, cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    if let Some(n) = cli.threads {
        return Ok(Some(n));
    }
    if let Ok(v) = std::env::var("RWL_THREADS") {
        return v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("RWL_THREADS must be a positive integer, got `{v}`")));
    }
    Ok(cfg.threads)
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let params = cfg.params.build()?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("rwl-out"));
    let threads = thread_count(cli, &cfg)?;
    if threads == Some(0) {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    let ctx = Context { cfg, params, out, seed: cli.seed, quiet: cli.quiet };
    ensure_dir(&ctx.out)?;
    match cli.command {
        Command::Simulate => simulate(&ctx),
        Command::Linear => linear(&ctx),
        Command::All => all(&ctx, threads),
        cmd => {
            let name = cmd.experiment().expect("experiment subcommand");
            let code = single(&ctx, name)?;
            if cmd == Command::Norms {
                norms_input(&ctx)?;
            }
            Ok(code)
        }
    }
}

fn record(ctx: &Context, out: &ExperimentOutput) -> Result<bool, CliError> {
    write_experiment(&ctx.out.join(&out.report.experiment), out)?;
    let verdict = if out.report.pass { "PASS" } else { "FAIL" };
    ctx.progress(&format!("{verdict} {}", out.report.experiment));
    Ok(out.report.pass)
}

fn single(ctx: &Context, name: &str) -> Result<i32, CliError> {
    let suite = ctx.cfg.suite(ctx.seed);
    let out = run_experiment(name, ctx.params, &suite)?;
    Ok(if record(ctx, &out)? { exit::PASS } else { exit::FAILED })
}

#[derive(Serialize)]
struct SummaryEntry {
    experiment: String,
    pass: bool,
}

#[derive(Serialize)]
struct Summary {
    pass: bool,
    experiments: Vec<SummaryEntry>,
}

fn all(ctx: &Context, threads: Option<usize>) -> Result<i32, CliError> {
    let suite = ctx.cfg.suite(ctx.seed);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    // results come back in registry order regardless of scheduling
    let results: Vec<Result<ExperimentOutput, CliError>> = pool.install(|| {
        EXPERIMENTS
            .par_iter()
            .map(|name| run_experiment(name, ctx.params, &suite).map_err(CliError::from))
            .collect()
    });
    let mut entries = Vec::new();
    let mut first_error = None;
    for (name, res) in EXPERIMENTS.iter().zip(results) {
        match res {
            Ok(out) => {
                let pass = record(ctx, &out)?;
                entries.push(SummaryEntry { experiment: (*name).to_owned(), pass });
            }
            Err(e) => {
                eprintln!("rwl: {name}: {e}");
                entries.push(SummaryEntry { experiment: (*name).to_owned(), pass: false });
                first_error.get_or_insert(e);
            }
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    write_json(&ctx.out.join("summary.json"), &Summary { pass, experiments: entries })?;
    if let Some(e) = first_error {
        return Ok(e.exit_code());
    }
    Ok(if pass { exit::PASS } else { exit::FAILED })
}

/// One row of `simulate.csv`.
pub fn simulate_row(state: &RadialState, exterior_radius: f64) -> Result<Vec<f64>, CliError> {
    let e = nonlinear_energy(state)?;
    let g = state.grid();
    // beyond the grid the solution vanishes by causal closure
    let ext = if exterior_radius + state.time.abs() >= g.r_max() {
        0.0
    } else {
        exterior_generalized_energy(state, exterior_radius)?
    };
    Ok(vec![state.time, e.e_m, e.e_2, e.total_nonlinear, ext, state.w.max_abs()])
}

#[derive(Serialize)]
struct SimulateSummary {
    params: Params,
    dt: f64,
    snapshots: usize,
    status: RunStatus,
}

fn simulate(ctx: &Context) -> Result<i32, CliError> {
    let block = &ctx.cfg.simulate;
    let grid = block.grid.build()?;
    let data = block.data.resolve()?.build(ctx.params, grid)?;
    let traj = evolve(&data, &block.solver)?;
    let dir = ctx.out.join("simulate");
    ensure_dir(&dir)?;
    let rows = traj
        .states
        .iter()
        .map(|s| simulate_row(s, block.exterior_radius))
        .collect::<Result<Vec<_>, _>>()?;
    let columns: Vec<String> = SIMULATE_COLUMNS.iter().map(|c| (*c).to_owned()).collect();
    write_csv(&dir.join("simulate.csv"), &columns, &rows)?;
    write_json(
        &dir.join("summary.json"),
        &SimulateSummary { params: ctx.params, dt: traj.dt, snapshots: traj.states.len(), status: traj.status },
    )?;
    match traj.status {
        RunStatus::Completed => {
            ctx.progress("simulate: completed");
            Ok(exit::PASS)
        }
        RunStatus::BlewUp { t_star } if block.expect_blowup => {
            ctx.progress(&format!("simulate: blow-up at t = {t_star}"));
            Ok(exit::PASS)
        }
        RunStatus::BlewUp { t_star } => Err(CliError::Numerical(format!("unexpected blow-up at t = {t_star}"))),
        RunStatus::Unstable { t } => Err(CliError::Numerical(format!("non-finite values at t = {t}"))),
    }
}

fn linear(ctx: &Context) -> Result<i32, CliError> {
    let block = &ctx.cfg.linear;
    let grid = block.grid.build()?;
    let data = block.data.resolve()?.build(ctx.params, grid)?;
    let t_max = block.times.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let profile = build_free_profile(&data, grid.r_max() + t_max)?;
    let mut rows = Vec::new();
    for &t in &block.times {
        let st = profile.eval_linear(t, &grid)?;
        for (i, r) in grid.nodes().enumerate() {
            rows.push(vec![t, r, st.w.values()[i], st.wt.values()[i]]);
        }
    }
    let dir = ctx.out.join("linear");
    ensure_dir(&dir)?;
    let columns: Vec<String> = LINEAR_COLUMNS.iter().map(|c| (*c).to_owned()).collect();
    write_csv(&dir.join("linear.csv"), &columns, &rows)?;
    ctx.progress("linear: written");
    Ok(exit::PASS)
}

fn norms_input(ctx: &Context) -> Result<(), CliError> {
    let block = &ctx.cfg.norms_input;
    let Some(data) = &block.data else { return Ok(()) };
    let grid = block.grid.build()?;
    let phi = data.resolve()?.build(ctx.params, grid)?.w;
    let t = norm_table(&phi, &ctx.params)?;
    let mut rows = Vec::new();
    for &radius in &block.utov_radii {
        let (l, r) = utov_sides(&phi, radius, ctx.params.m())?;
        rows.push(vec![radius, t.hardy_origin, t.hardy_derivative, t.hardy_infinity, t.explicit_ratio, l, r]);
    }
    let columns: Vec<String> = [
        "R",
        "hardy_origin",
        "hardy_derivative",
        "hardy_infinity",
        "explicit_ratio",
        "utov_lhs",
        "utov_rhs",
    ]
    .iter()
    .map(|c| (*c).to_owned())
    .collect();
    let dir: &Path = &ctx.out.join("norms");
    ensure_dir(dir)?;
    write_csv(&dir.join("norm_table.csv"), &columns, &rows)
}
