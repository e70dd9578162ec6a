//! Subcommand implementations. Each writes its report to the given sink and
//! returns the process exit code.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use cyclelap::operators::laplacian_apply;
use cyclelap::solver::{solve, Mode, SolveResult, SolverConfig, Termination};
use cyclelap::{Graph, TreeStrategy, VertexFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formats::{self, InputError};
use crate::generate::{self, GraphKind, InvalidParams};
use crate::summary::RunSummary;
use crate::verify::{self, random_rhs};

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;

/// Header of the trace CSV.
pub const TRACE_HEADER: &str = "iter,energy,gap";
/// Header of the bench CSV.
pub const BENCH_HEADER: &str = "seed,n,m,tau,mode,iterations_to_tol,termination,wall_time_ms";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Params(#[from] InvalidParams),
    #[error("{0}")]
    Solver(#[from] cyclelap::Error),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub graph: PathBuf,
    pub rhs: PathBuf,
    pub tol: f64,
    pub max_iters: u64,
    pub seed: u64,
    pub tree: TreeStrategy,
    pub mode: Mode,
    pub trace_out: Option<PathBuf>,
    pub u_out: PathBuf,
    pub a_out: Option<PathBuf>,
}

pub fn trace_csv(result: &SolveResult) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for p in &result.trace {
        let _ = writeln!(out, "{},{},{}", p.iteration, p.energy, p.gap);
    }
    out
}

pub fn summarize(
    g: &Graph,
    f: &[f64],
    result: &SolveResult,
    cfg: &SolverConfig,
    wall_time_ms: f64,
) -> RunSummary {
    let lu = laplacian_apply(g, &result.potentials).expect("potentials live on the graph");
    let residual_inf = lu
        .iter()
        .zip(f)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    RunSummary {
        n: g.vertex_count(),
        m: g.edge_count(),
        p: result.basis_len,
        tau: result.tau,
        tree_strategy: cfg.tree_strategy.to_string(),
        mode: cfg.mode.to_string(),
        seed: result.seed,
        iterations: result.iterations,
        final_energy: result.final_energy(),
        final_gap: result.final_gap(),
        termination: result.termination.to_string(),
        wall_time_ms,
        residual_inf,
    }
}

fn exit_code(termination: Termination) -> i32 {
    match termination {
        Termination::Converged => EXIT_CONVERGED,
        Termination::MaxIters => EXIT_MAX_ITERS,
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = formats::read_graph(&args.graph)?;
    let f = VertexFunction::new(formats::read_vector(&args.rhs, g.vertex_count())?);
    let cfg = SolverConfig {
        tol: args.tol,
        max_iters: args.max_iters,
        seed: args.seed,
        gap_check_every: None,
        mode: args.mode,
        tree_strategy: args.tree,
        root: 0,
    };
    let start = Instant::now();
    let result = solve(&g, &f, &cfg)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    formats::write_file(&args.u_out, &formats::format_vector(&result.potentials))?;
    if let Some(path) = &args.a_out {
        formats::write_file(path, &formats::format_vector(&result.flow))?;
    }
    if let Some(path) = &args.trace_out {
        formats::write_file(path, &trace_csv(&result))?;
    }
    let summary = summarize(&g, &f, &result, &cfg, wall_time_ms);
    out.write_all(summary.render().as_bytes())?;
    Ok(exit_code(result.termination))
}

/// Generate a graph and write it to `out_path`, or to `out` when absent.
pub fn cmd_gen(
    kind: GraphKind,
    params: &[usize],
    seed: u64,
    out_path: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<Graph, CliError> {
    let g = generate::generate(kind, params, seed)?;
    let text = formats::format_graph(&g);
    match out_path {
        Some(path) => formats::write_file(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(g)
}

pub fn cmd_verify(
    graph: &std::path::Path,
    trials: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let g = formats::read_graph(graph)?;
    let checks = verify::run_battery(&g, trials, seed);
    writeln!(
        out,
        "# verify n={} m={} trials={trials} seed={seed}",
        g.vertex_count(),
        g.edge_count()
    )?;
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "# {} checks, {failed} failed", checks.len())?;
    Ok(if failed == 0 {
        EXIT_CONVERGED
    } else {
        EXIT_INPUT_ERROR
    })
}

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub kind: GraphKind,
    pub size: usize,
    pub seeds: u64,
    pub modes: Vec<Mode>,
    pub tol: f64,
    pub max_iters: u64,
    pub tree: TreeStrategy,
}

/// Graph used by `bench` for a kind and size. Random graphs use `m = 2n`
/// (capped at the complete graph) and generator seed 0.
pub fn bench_graph(kind: GraphKind, size: usize) -> Result<Graph, InvalidParams> {
    match kind {
        GraphKind::Path | GraphKind::Cycle | GraphKind::Torus => {
            generate::generate(kind, &[size], 0)
        }
        GraphKind::Grid => generate::grid(size, size),
        GraphKind::Random => {
            let max = size * size.saturating_sub(1) / 2;
            generate::random(size, (2 * size).min(max).max(size.saturating_sub(1)), 0)
        }
    }
}

/// One row per (seed, mode); the right-hand side is drawn from the seed.
pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = bench_graph(args.kind, args.size)?;
    writeln!(out, "{BENCH_HEADER}")?;
    let mut worst = EXIT_CONVERGED;
    for seed in 0..args.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rhs(&mut rng, g.vertex_count());
        for &mode in &args.modes {
            let cfg = SolverConfig {
                tol: args.tol,
                max_iters: args.max_iters,
                seed,
                mode,
                tree_strategy: args.tree,
                ..Default::default()
            };
            let start = Instant::now();
            let r = solve(&g, &f, &cfg)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if r.termination == Termination::MaxIters {
                worst = EXIT_MAX_ITERS;
            }
            writeln!(
                out,
                "{seed},{},{},{},{mode},{},{},{ms:.3}",
                g.vertex_count(),
                g.edge_count(),
                r.tau,
                r.iterations,
                r.termination
            )?;
        }
    }
    Ok(worst)
}
