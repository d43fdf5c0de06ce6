use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use warped_hardy::cli::{inequality_catalog, prepare, run, ExperimentKind, RunConfig};
use warped_hardy::Error;

#[derive(Parser)]
#[command(name = "warped-hardy", version, about = "Verify Hardy-type inequalities on model manifolds")]
struct Args {
    /// Print the inequality catalog and exit.
    #[arg(long)]
    list_inequalities: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate inequality margins on seeded test functions.
    Verify(Paths),
    /// Spectral estimates of best constants.
    Sharpness(Paths),
    /// Rayleigh quotients along the minimizing sequence.
    Sequence(Paths),
    /// Tabulate curvatures.
    Curvature(Paths),
    /// Run every experiment in the config.
    Run(Paths),
}

#[derive(clap::Args)]
struct Paths {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to `output.path` in the config, then `.`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_inequalities {
        print!("{}", inequality_catalog());
        return ExitCode::SUCCESS;
    }
    let Some(command) = args.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(2);
    };
    let (paths, only) = match command {
        Command::Verify(p) => (p, Some(ExperimentKind::Verify)),
        Command::Sharpness(p) => (p, Some(ExperimentKind::Sharpness)),
        Command::Sequence(p) => (p, Some(ExperimentKind::Sequence)),
        Command::Curvature(p) => (p, Some(ExperimentKind::Curvature)),
        Command::Run(p) => (p, None),
    };
    let config = match RunConfig::load(&paths.config).and_then(|c| prepare(&c).map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = paths
        .out
        .or_else(|| config.output.path.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    match run(&config, only, &out) {
        Ok(summary) => {
            for o in &summary.outcomes {
                for f in &o.files {
                    println!("{}", f.display());
                }
            }
            if summary.passed() {
                ExitCode::SUCCESS
            } else {
                for f in summary.failures() {
                    eprintln!("FAIL {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(Error::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
