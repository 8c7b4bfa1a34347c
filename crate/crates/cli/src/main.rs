mod commands;
mod funcspec;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{cantor, functionals, lip, realline, space};
use report::Report;

#[derive(Parser)]
#[command(
    name = "fractalkit",
    version,
    about = "Hausdorff contents, Cantor sets and related computations on finite data"
)]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized steps; recorded in the report
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report to this file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Write the command's CSV table to this file
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a covering dimension from counts over a scale schedule
    Dim(space::DimArgs),
    /// Hausdorff content upper bounds over one or more scales
    Content(space::ContentArgs),
    /// Greedy disjoint selection from a family of subsets
    Cover(space::CoverArgs),
    /// Cantor set construction, integration and homeomorphisms
    #[command(subcommand)]
    Cantor(cantor::CantorCommand),
    /// Hausdorff distance between two point clouds, or along a sequence
    Hdist(space::HdistArgs),
    /// Epsilon-chain components and disconnectedness profiles
    Components(space::ComponentsArgs),
    /// Lipschitz extension, approximation and level profiles
    #[command(subcommand)]
    Lip(lip::LipCommand),
    /// Riemann-Stieltjes integral against a monotone function
    Stieltjes(realline::StieltjesArgs),
    /// Total variation by partition refinement
    Variation(realline::VariationArgs),
    /// Maximal function scan and superlevel set
    Maximal(realline::MaximalArgs),
    /// Superlevel set of a step function against its Chebyshev bound
    Chebyshev(realline::ChebyshevArgs),
    /// Discrete functionals: evaluation, convolution, Fourier transform
    #[command(name = "fn", subcommand)]
    Fn(functionals::FnCommand),
}

type Job = Box<dyn FnOnce(&mut Report) -> Result<serde_json::Value>>;

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let (name, run): (&str, Job) = match cli.command {
        Command::Dim(a) => ("dim", Box::new(move |r| space::dim(r, a))),
        Command::Content(a) => ("content", Box::new(move |r| space::content(r, a))),
        Command::Cover(a) => ("cover", Box::new(move |r| space::cover(r, a))),
        Command::Cantor(c) => (c.name(), Box::new(move |r| cantor::run(r, c))),
        Command::Hdist(a) => (a.name(), Box::new(move |r| space::hdist(r, a))),
        Command::Components(a) => ("components", Box::new(move |r| space::components(r, a))),
        Command::Lip(c) => (c.name(), Box::new(move |r| lip::run(r, c))),
        Command::Stieltjes(a) => ("stieltjes", Box::new(move |r| realline::stieltjes(r, a))),
        Command::Variation(a) => ("variation", Box::new(move |r| realline::variation(r, a))),
        Command::Maximal(a) => ("maximal", Box::new(move |r| realline::maximal(r, a))),
        Command::Chebyshev(a) => ("chebyshev", Box::new(move |r| realline::chebyshev(r, a))),
        Command::Fn(c) => (c.name(), Box::new(move |r| functionals::run(r, c, cli.seed))),
    };
    let mut report = Report::new(name);
    let result = run(&mut report)?;
    let (text, table) = report.finish(result, cli.seed)?;
    if let (Some(path), Some(table)) = (&cli.table, &table) {
        table.write(path)?;
    }
    report::emit(&text, cli.output.as_deref())
}

/// 3 for numerical non-convergence, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|c| c.downcast_ref::<fractalkit::Error>())
        .any(fractalkit::Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
