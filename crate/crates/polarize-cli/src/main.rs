//! polarize — slice minima, proof checks, and product witnesses for unit
//! vector systems on the command line.
//!
//! Exit codes: 0 when the command succeeds and every checked property
//! passes, 1 when a checked property fails (a witness misses the bound, a
//! scan finds the bound violated, a verification check fails), 2 for
//! usage or input errors.

mod commands;
mod io;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use render::Format;

#[derive(Parser)]
#[command(
    name = "polarize",
    version,
    about = "Slice minima, proof checks, and product witnesses for unit vector systems"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Exact sign search over all 2^(n-1) assignments (n <= 24).
    Exhaustive,
    /// Randomized local search; requires --seed.
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    /// Independent uniform points on the sphere.
    Uniform,
    /// Orthonormal basis plus Gaussian noise (see --noise).
    Perturbed,
    /// Vectors inside a spherical cap (see --radius).
    Clustered,
    /// Cycle through the three kinds with varied parameters.
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form minimum of the coordinate product over a cube slice.
    Mu {
        /// Dimension, n >= 2.
        #[arg(long)]
        n: usize,
        /// Slice level; must lie in [sqrt(n), n].
        #[arg(long)]
        s: f64,
    },
    /// Breakpoint levels s_j of the slice minimum and the minimum at each.
    Breakpoints {
        /// Dimension, n >= 2.
        #[arg(long)]
        n: usize,
    },
    /// Power table rows with the bound verdict per dimension.
    Table {
        /// First row, at least 3.
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        /// Last row, at most 16.
        #[arg(long, default_value_t = 16)]
        n_max: usize,
    },
    /// Grid scan of the slice minimum over [sqrt(n), n] against n^(-n/2).
    ///
    /// Exits 1 when the scan finds the bound violated (expected for n >= 15).
    Scan {
        /// Dimension, n >= 2.
        #[arg(long)]
        n: usize,
        /// Uniform grid steps; every breakpoint is also visited.
        #[arg(long, default_value_t = 100_000)]
        grid: usize,
    },
    /// Longest signed sum of a vector file and the witness it induces.
    ///
    /// Exits 1 when the witness product misses the n^(-n/2) bound.
    Witness {
        /// Vector set: JSON {"vectors": [[...], ...]} or bare CSV rows (.csv).
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exhaustive)]
        method: MethodArg,
        /// RNG seed; required with --method local.
        #[arg(long)]
        seed: Option<u64>,
        /// Local-search restarts.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Multi-start sphere maximization of the inner-product product.
    ///
    /// Exits 1 when the best product found misses the n^(-n/2) bound.
    Maximize {
        /// Vector set: JSON {"vectors": [[...], ...]} or bare CSV rows (.csv).
        input: PathBuf,
        /// RNG seed for the optimizer starts.
        #[arg(long)]
        seed: u64,
        /// Number of starts; defaults to 8 + 2n.
        #[arg(long)]
        starts: Option<usize>,
        /// Iteration cap per start.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Tangent-gradient norm at which a start counts as converged.
        #[arg(long)]
        grad_tol: Option<f64>,
        /// Also test the equality case: product at the bound and Gram
        /// orthonormal (n <= 14).
        #[arg(long)]
        check_equality: bool,
    },
    /// Deterministic proof checks plus randomized witness trials.
    ///
    /// Single entry point for CI: exits 0 only if every check passes.
    Verify {
        /// Largest dimension to check, in [2, 14].
        #[arg(long, default_value_t = 14)]
        n_max: usize,
        /// Random witness trials per dimension (0 disables them).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// RNG seed for the trials.
        #[arg(long)]
        seed: u64,
        /// Grid for the scan and shape checks, at least 100.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Randomized witness trials for one dimension and generator kind.
    ///
    /// Exits 1 when any trial's witness misses the bound.
    RandomTrials {
        /// Dimension, n >= 2.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        /// RNG seed deriving every per-trial seed.
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Mixed)]
        kind: KindArg,
        /// Noise level for --kind perturbed.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        /// Angular radius for --kind clustered, in (0, pi/2].
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exhaustive)]
        method: MethodArg,
        /// Local-search restarts.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Map the longest-sum result of a vector file into its cube slice.
    Lambda {
        /// Vector set: JSON {"vectors": [[...], ...]} or bare CSV rows (.csv).
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exhaustive)]
        method: MethodArg,
        /// RNG seed; required with --method local.
        #[arg(long)]
        seed: Option<u64>,
        /// Local-search restarts.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
}

/// Honors POLARIZE_THREADS as a cap on rayon workers. Results never
/// depend on the worker count; only wall time does.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("POLARIZE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("POLARIZE_THREADS must be a positive integer (got {raw:?})"))?;
    if threads == 0 {
        bail!("POLARIZE_THREADS must be positive (got 0)");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("initializing the rayon thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let format = cli.format;
    match cli.command {
        Command::Mu { n, s } => commands::mu(n, s, format),
        Command::Breakpoints { n } => commands::breakpoints_cmd(n, format),
        Command::Table { n_min, n_max } => commands::table(n_min, n_max, format),
        Command::Scan { n, grid } => commands::scan(n, grid, format),
        Command::Witness {
            input,
            method,
            seed,
            restarts,
        } => commands::witness(&input, method, seed, restarts, format),
        Command::Maximize {
            input,
            seed,
            starts,
            max_iters,
            grad_tol,
            check_equality,
        } => commands::maximize(
            &input,
            seed,
            starts,
            max_iters,
            grad_tol,
            check_equality,
            format,
        ),
        Command::Verify {
            n_max,
            trials,
            seed,
            grid,
        } => commands::verify(n_max, trials, seed, grid, format),
        Command::RandomTrials {
            n,
            trials,
            seed,
            kind,
            noise,
            radius,
            method,
            restarts,
        } => commands::random_trials(n, trials, seed, kind, noise, radius, method, restarts, format),
        Command::Lambda {
            input,
            method,
            seed,
            restarts,
        } => commands::lambda(&input, method, seed, restarts, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
