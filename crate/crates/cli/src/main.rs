use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cyclelap::solver::Mode;
use cyclelap::TreeStrategy;
use cyclelap_cli::commands::{self, BenchArgs, CliError, SolveArgs, EXIT_INPUT_ERROR};
use cyclelap_cli::generate::GraphKind;

#[derive(Parser)]
#[command(
    name = "cyclelap",
    version,
    about = "Graph Laplacian solver by randomized tree-cycle updates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve L u = f; prints a key=value summary. Exit 0 converged, 2 iteration cap, 1 bad input.
    Solve {
        graph: PathBuf,
        rhs: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000_000)]
        max_iters: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "bfs", value_parser = parse_tree)]
        tree: TreeStrategy,
        #[arg(long, default_value = "random", value_parser = parse_mode)]
        mode: Mode,
        /// CSV with columns iter,energy,gap.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, default_value = "u.txt")]
        u_out: PathBuf,
        /// Final flow, one value per edge in graph-file order.
        #[arg(long)]
        a_out: Option<PathBuf>,
    },
    /// Generate a graph file: path N | cycle N | grid ROWS COLS | torus K | random N M.
    Gen {
        #[arg(value_parser = parse_kind)]
        kind: GraphKind,
        params: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery on a graph. Exit 0 iff every check passes.
    Verify {
        graph: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Iterations to tolerance per seed and mode, as CSV.
    Bench {
        #[arg(long, value_parser = parse_kind)]
        kind: GraphKind,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_enum, default_value_t = BenchMode::Random)]
        mode: BenchMode,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000_000)]
        max_iters: u64,
        #[arg(long, default_value = "bfs", value_parser = parse_tree)]
        tree: TreeStrategy,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    Random,
    Sweep,
    Both,
}

fn parse_tree(s: &str) -> Result<TreeStrategy, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<GraphKind, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match cli.command {
        Command::Solve {
            graph,
            rhs,
            tol,
            max_iters,
            seed,
            tree,
            mode,
            trace_out,
            u_out,
            a_out,
        } => commands::cmd_solve(
            &SolveArgs {
                graph,
                rhs,
                tol,
                max_iters,
                seed,
                tree,
                mode,
                trace_out,
                u_out,
                a_out,
            },
            &mut out,
        )?,
        Command::Gen {
            kind,
            params,
            seed,
            out: path,
        } => {
            commands::cmd_gen(kind, &params, seed, path.as_deref(), &mut out)?;
            0
        }
        Command::Verify {
            graph,
            trials,
            seed,
        } => commands::cmd_verify(&graph, trials, seed, &mut out)?,
        Command::Bench {
            kind,
            size,
            seeds,
            mode,
            tol,
            max_iters,
            tree,
        } => {
            let modes = match mode {
                BenchMode::Random => vec![Mode::Random],
                BenchMode::Sweep => vec![Mode::Sweep],
                BenchMode::Both => vec![Mode::Random, Mode::Sweep],
            };
            commands::cmd_bench(
                &BenchArgs {
                    kind,
                    size,
                    seeds,
                    modes,
                    tol,
                    max_iters,
                    tree,
                },
                &mut out,
            )?
        }
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
