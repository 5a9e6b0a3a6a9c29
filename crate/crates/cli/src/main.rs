//! `cantordiff`: command line access to the random Cantor set library.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use cantordiff_core::Error;
use clap::{Parser, Subcommand};

use config::Settings;

#[derive(Parser)]
#[command(
    name = "cantordiff",
    version,
    about = "Random Cantor sets and their difference sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Region of (a, b) and derived constants.
    Classify,
    /// Build the type space T(eps).
    Typespace,
    /// Dominant eigenvalue and eigenfunctions of the discretized kernel.
    Spectrum,
    /// Simulate the branching process from one ancestor.
    Branching,
    /// Estimate the Main Lemma probability over a grid of ancestors.
    Mainlemma,
    /// Monte Carlo coverage of I by the 45-degree projection.
    Diffset,
    /// Evaluate the product lower bound.
    Bound,
    /// SVG of the parameter region.
    RenderRegion,
    /// SVG of Cantor levels and labelled squares with the line e(x).
    RenderSquares,
    /// SVG of the kernel stripes over T x T.
    RenderKernel,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Typespace => "typespace",
            Command::Spectrum => "spectrum",
            Command::Branching => "branching",
            Command::Mainlemma => "mainlemma",
            Command::Diffset => "diffset",
            Command::Bound => "bound",
            Command::RenderRegion => "render-region",
            Command::RenderSquares => "render-squares",
            Command::RenderKernel => "render-kernel",
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Core(Error),
    Invariant(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Invariant(_) => 4,
            Failure::Core(e) => match e {
                Error::NoConvergence { .. }
                | Error::NotPositiveBy64
                | Error::ReducibleKernel(_) => 3,
                Error::InternalInconsistency(_) => 4,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => config::read_file(path)?,
        None => Settings::default(),
    };
    let cfg = config::resolve(cli.command.name(), file.overlay(cli.settings))?;
    if let Some(n) = cfg.workers {
        cantordiff_core::set_workers(n.max(1));
    }
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| Failure::Io(format!("{}: {e}", cfg.out.display())))?;
    let settings = serde_json::to_string_pretty(&cfg.to_settings()).expect("settings serialize");
    std::fs::write(cfg.out.join("config.json"), settings + "\n")
        .map_err(|e| Failure::Io(format!("{}: {e}", cfg.out.display())))?;
    let dir = cfg.out.clone();
    let summary = match cli.command {
        Command::Classify => commands::classify(&cfg, &dir),
        Command::Typespace => commands::typespace(&cfg, &dir),
        Command::Spectrum => commands::spectrum(&cfg, &dir),
        Command::Branching => commands::branching(&cfg, &dir),
        Command::Mainlemma => commands::mainlemma(&cfg, &dir),
        Command::Diffset => commands::diffset(&cfg, &dir),
        Command::Bound => commands::bound(&cfg, &dir),
        Command::RenderRegion => commands::render_region(&cfg, &dir),
        Command::RenderSquares => commands::render_squares(&cfg, &dir),
        Command::RenderKernel => commands::render_kernel(&cfg, &dir),
    }?;
    use std::io::Write;
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    // a closed pipe (e.g. `| head`) is not a failure of the run
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cantordiff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
