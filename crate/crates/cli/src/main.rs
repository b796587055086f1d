//! Command-line entry point.
//!
//! Exit codes: 0 when every verdict passes, 2 when any verdict fails,
//! 1 on usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use radwave_cli::commands;
use radwave_cli::config::ScenarioConfig;
use radwave_cli::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "radwave",
    version,
    about = "Numerical laboratory for the radial defocusing semilinear wave equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir from the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent runs (0 = automatic).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Strip the wall-clock metadata field for bit-exact output diffs.
    #[arg(long)]
    seed_metadata_off: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario and persist snapshots, origin series, and the report.
    Simulate(CommonArgs),
    /// Evaluate the boundary flux identities on a refinement ladder.
    VerifyFlux(CommonArgs),
    /// Evaluate the centered space-time inequality and its identity form.
    VerifyMorawetz(CommonArgs),
    /// Extract radiation fields and run the scattering diagnostics.
    Scattering(CommonArgs),
    /// Measure convergence orders over a refinement ladder.
    Convergence(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::VerifyFlux(a)
            | Command::VerifyMorawetz(a)
            | Command::Scattering(a)
            | Command::Convergence(a) => a,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are not usage errors.
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(1);
        }
    };

    let common = cli.command.common();
    if common.threads > 0 {
        // Ignore failure when a pool already exists (tests, repeated calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global();
    }

    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(command: &Command) -> anyhow::Result<bool> {
    let common = command.common();
    let config = ScenarioConfig::load(&common.config)?;
    let out_dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let stamped = !common.seed_metadata_off;
    let scenario = Scenario::prepare(config)?;
    match command {
        Command::Simulate(_) => commands::simulate::execute(&scenario, &out_dir, stamped),
        Command::VerifyFlux(_) => commands::verify_flux::execute(&scenario, &out_dir, stamped),
        Command::VerifyMorawetz(_) => {
            commands::verify_morawetz::execute(&scenario, &out_dir, stamped)
        }
        Command::Scattering(_) => commands::scattering::execute(&scenario, &out_dir, stamped),
        Command::Convergence(_) => commands::convergence::execute(&scenario, &out_dir, stamped),
    }
}
