use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use stoq_harness::{Experiment, ExperimentConfig, HarnessError, Overrides};

#[derive(Parser)]
#[command(name = "stoq", version, about = "Stochastic unitary compilation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML file with any of the flag names as keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Cost-vs-iteration traces for compiling e^{iH tau}.
    CostCurves(Common),
    /// Path distances and time/cost table for Trotter, QDRIFT and STOQ.
    PathCompare(Common),
    /// Cost traces for Haar-random targets.
    RandomUnitary(Common),
    /// Final cost vs average depth of random circuit targets.
    DepthSweep(Common),
    /// Final cost over a delta-beta x p-append grid.
    ParamSweep(Common),
    /// Single compilation of a target file or a Hamiltonian evolution.
    Compile(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::CostCurves(c) => (Experiment::CostCurves, c),
        Command::PathCompare(c) => (Experiment::PathCompare, c),
        Command::RandomUnitary(c) => (Experiment::RandomUnitary, c),
        Command::DepthSweep(c) => (Experiment::DepthSweep, c),
        Command::ParamSweep(c) => (Experiment::ParamSweep, c),
        Command::Compile(c) => (Experiment::Compile, c),
    };
    match execute(experiment, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(experiment: Experiment, common: Common) -> Result<(), HarnessError> {
    let file = match &common.config {
        Some(path) => Overrides::from_toml_file(path)?,
        None => Overrides::default(),
    };
    let cfg = ExperimentConfig::resolve(experiment, file.layer(common.overrides))?;
    let start = Instant::now();
    let written = stoq_harness::run(&cfg)?;
    eprintln!(
        "{experiment}: wrote {} files to {} in {:.1}s",
        written.len(),
        cfg.out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
