//! Batch front end: `solve`, `sweep` and `selftest`.

mod config;
mod output;
mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use config::{Coefficients, GridSpec, Mode, ResolventSpec, RunConfig, SolveSpec, SweepSpec, SCHEMA_VERSION};
pub use output::{
    emit_plot_data, inventory, sha256_file, write_atomic, write_manifest, FileEntry, RunManifest, Timing,
};
pub use selftest::{run_selftest, Check};

use crate::concentration::run_sweep;
use crate::dual::DualProblem;
use crate::error::{Error, Result};
use crate::field::{make_dilated_coefficient, ScalarField};
use crate::groundstate::{solve_ground_state, Solution};
use crate::resolvent::ResolventPlan;

pub const THREADS_ENV: &str = "HDUAL_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hdual", version, about = "Dual ground states of Helmholtz systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads; falls back to HDUAL_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground state at a single eps with every configured algorithm.
    Solve(RunArgs),
    /// Concentration sweep over eps.
    Sweep(RunArgs),
    /// Invariant checks with pinned tolerances.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return if n > 0 { Ok(n) } else { Err(Error::Config("--threads must be positive".into())) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={s:?} is not a positive integer"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => run_mode(Mode::Solve, &RunOptions::from(&a)),
        Command::Sweep(a) => run_mode(Mode::Sweep, &RunOptions::from(&a)),
        Command::Selftest { quick, threads } => {
            thread_count(threads).and_then(|t| with_pool(t, || selftest_report(quick))).and_then(|r| r)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            match &e {
                Error::RegionViolation(r) => eprintln!("error: {e}\nreason: {}", r.code()),
                _ => eprintln!("error: {e}"),
            }
            EXIT_CONFIG
        }
    }
}

fn selftest_report(quick: bool) -> Result<i32> {
    let checks = run_selftest(quick)?;
    for c in &checks {
        println!("{} {:<34} {:.3e} (tol {:.0e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_PARTIAL })
}

/// Runs `solve` or `sweep` from a config file.
pub fn run_mode(mode: Mode, args: &RunOptions) -> Result<i32> {
    let cfg = RunConfig::load(&args.config)?;
    cfg.validate(mode)?;
    let threads = thread_count(args.threads)?;
    let out = args.output.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("hdual-out"));
    std::fs::create_dir_all(&out)?;
    with_pool(threads, || match mode {
        Mode::Solve => run_solve(&cfg, &out, threads),
        Mode::Sweep => run_sweep_mode(&cfg, &out, threads),
        Mode::Selftest => selftest_report(false),
    })?
}

/// Run arguments, usable without the parser.
pub struct RunOptions {
    pub config: PathBuf,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl From<&RunArgs> for RunOptions {
    fn from(a: &RunArgs) -> Self {
        RunOptions { config: a.config.clone(), output: a.output.clone(), threads: a.threads }
    }
}

struct Recorder {
    root: PathBuf,
    files: Vec<PathBuf>,
    timings: Vec<Timing>,
}

impl Recorder {
    fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root.join("fields"))?;
        Ok(Recorder { root: root.to_path_buf(), files: Vec::new(), timings: Vec::new() })
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let r = f();
        self.timings.push(Timing { phase: phase.to_string(), seconds: t.elapsed().as_secs_f64() });
        r
    }

    fn dump(&mut self, name: &str, role: &str, f: &ScalarField) -> Result<()> {
        let (a, b) = f.write_dump(&self.root.join("fields").join(name), role)?;
        self.files.push(a);
        self.files.push(b);
        Ok(())
    }

    fn dump_solution(&mut self, prefix: &str, s: &Solution) -> Result<()> {
        self.dump(&format!("{prefix}_psi"), "psi", s.state.psi())?;
        self.dump(&format!("{prefix}_phi"), "phi", s.state.phi())?;
        self.dump(&format!("{prefix}_u"), "u", &s.primal.u)?;
        self.dump(&format!("{prefix}_v"), "v", &s.primal.v)
    }

    fn finish(self, command: &str, cfg: &RunConfig, threads: usize, scalars: Value) -> Result<()> {
        let manifest = RunManifest {
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: serde_json::to_value(cfg)?,
            threads,
            timings: self.timings,
            scalars,
            files: inventory(&self.root, &self.files)?,
        };
        let path = write_manifest(&self.root, &manifest)?;
        log::info!("wrote {}", path.display());
        Ok(())
    }
}

fn solution_scalars(s: &Solution) -> Value {
    json!({
        "algorithm": s.algorithm.tag(),
        "energy": s.energy,
        "iterations": s.iterations,
        "residual": s.residual,
        "converged": s.converged,
        "nehari": {"a": s.state.a(), "b": s.state.b(), "c": s.state.c()},
        "primal_residual_u": s.primal.residual_u,
        "primal_residual_v": s.primal.residual_v,
        "primal_relative_u": s.primal.relative_u,
        "primal_relative_v": s.primal.relative_v,
    })
}

fn run_solve(cfg: &RunConfig, out: &Path, threads: usize) -> Result<i32> {
    let exps = cfg.validate(Mode::Solve)?;
    let mut rec = Recorder::new(out)?;
    let grid = cfg.grid()?;
    let plan = Arc::new(rec.time("plan", || ResolventPlan::new(grid, cfg.resolvent.delta))?);
    let pc = make_dilated_coefficient(&cfg.coefficients.p, grid, cfg.solve.eps)?;
    let qc = make_dilated_coefficient(&cfg.coefficients.q, grid, cfg.solve.eps)?;
    let prob = DualProblem::new(exps, pc, qc, plan.clone())?;

    let mut results = Vec::new();
    for &alg in &cfg.solve.algorithms {
        let mut sc = cfg.solver.clone();
        sc.algorithm = alg;
        let r = rec.time(alg.tag(), || solve_ground_state(&prob, &sc));
        match r {
            Ok(s) => {
                log::info!("{}: c = {} after {} iterations", alg.tag(), s.energy, s.iterations);
                rec.dump_solution(alg.tag(), &s)?;
                results.push(Ok(s));
            }
            Err(e) => {
                log::warn!("{}: {e}", alg.tag());
                results.push(Err((alg, e.to_string())));
            }
        }
    }

    let energies: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().map(|s| s.energy)).collect();
    let spread = match (energies.iter().copied().reduce(f64::min), energies.iter().copied().reduce(f64::max)) {
        (Some(lo), Some(hi)) => (hi - lo) / lo.abs(),
        _ => f64::NAN,
    };
    let all_ok = results.iter().all(|r| matches!(r, Ok(s) if s.converged));
    let agree = spread <= cfg.solve.agreement_tol;
    let c = results.iter().filter_map(|r| r.as_ref().ok()).filter(|s| s.converged).map(|s| s.energy).reduce(f64::min);
    let gap = plan.shell_gap();
    let scalars = json!({
        "exponents": exps,
        "eps": cfg.solve.eps,
        "delta": plan.delta(),
        "shell_min_gap": gap.min_gap,
        "shell_on_shell": gap.on_shell,
        "c": c,
        "energy_spread": spread,
        "agreement": agree,
        "runs": results.iter().map(|r| match r {
            Ok(s) => solution_scalars(s),
            Err((a, e)) => json!({"algorithm": a.tag(), "error": e}),
        }).collect::<Vec<_>>(),
    });
    rec.finish("solve", cfg, threads, scalars)?;
    Ok(if all_ok && agree { EXIT_OK } else { EXIT_PARTIAL })
}

fn run_sweep_mode(cfg: &RunConfig, out: &Path, threads: usize) -> Result<i32> {
    let sweep = cfg.sweep_config()?;
    let mut rec = Recorder::new(out)?;
    let report = rec.time("sweep", || run_sweep(&sweep))?;
    let plots = rec.time("plot_data", || emit_plot_data(&report, out))?;
    rec.files.extend(plots);
    if let Some(lim) = &report.limit {
        rec.dump_solution("limit", lim)?;
    }
    for (i, s) in report.solutions.iter().enumerate() {
        if let Some(s) = s {
            rec.dump_solution(&format!("eps{i:02}"), s)?;
        }
    }
    let scalars = serde_json::to_value(&report)?;
    let code = if report.all_converged() { EXIT_OK } else { EXIT_PARTIAL };
    rec.finish("sweep", cfg, threads, scalars)?;
    Ok(code)
}
