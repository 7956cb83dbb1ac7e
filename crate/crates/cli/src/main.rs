//! `spectrakit`: graph generation, CTM table builds and spectral/complexity
//! reports.
//!
//! Exit codes: 0 success, 2 usage or invalid parameter, 3 missing input or
//! table, 4 numerical failure.

mod commands;
mod error;
mod output;
mod svg;

use clap::{Parser, Subcommand};

use commands::{CtmBuildArgs, GenerateArgs, ReportCommand};

#[derive(Debug, Parser)]
#[command(
    name = "spectrakit",
    version,
    about = "Graph spectra versus algorithmic complexity"
)]
struct Cli {
    /// Omit the timestamp so repeated runs give byte-identical output.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a family member or a seeded random graph as an edge list.
    Generate(GenerateArgs),
    /// Build a coding-theorem table from small 2D machines.
    CtmBuild(CtmBuildArgs),
    /// Spectra, complexity, signature, sweep and correlation reports.
    #[command(subcommand)]
    Report(ReportCommand),
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = match cli.command {
        Command::Generate(args) => commands::generate(&args, cli.deterministic),
        Command::CtmBuild(args) => commands::ctm_build(&args, cli.deterministic),
        Command::Report(cmd) => commands::report(&cmd, cli.deterministic),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
