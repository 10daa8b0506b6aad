use std::path::PathBuf;
use std::process::ExitCode;

use bcklab_cli::{
    catalog, load_scenario, out_dir, read_text, set_jobs, simulate, sweep, verify_preset,
    verify_scenario, CliError, Format, Status,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bcklab",
    version,
    about = "Symmetries and first integrals of the linearly damped particle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory for the summary and artifacts
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for random states, overriding the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario, write trajectories and a summary
    Simulate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario's checks, or a preset suite
    Verify {
        #[arg(
            long,
            value_name = "PATH",
            required_unless_present = "preset",
            conflicts_with = "preset"
        )]
        config: Option<PathBuf>,
        /// Built-in suite; `paper-suite` runs every acceptance criterion
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a scenario over a parameter grid
    Sweep {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// List generators, integrals and charts
    Catalog {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            format,
            common,
        } => {
            set_jobs(common.jobs)?;
            let sc = load_scenario(&config, common.seed)?;
            simulate(&sc, &out_dir(common.out), format)
        }
        Command::Verify {
            config,
            preset,
            common,
        } => {
            set_jobs(common.jobs)?;
            match (config, preset) {
                (Some(path), _) => {
                    verify_scenario(&load_scenario(&path, common.seed)?, &out_dir(common.out))
                }
                (None, Some(p)) => verify_preset(&p, common.seed, &out_dir(common.out)),
                (None, None) => Err(CliError::Schema("verify needs --config or --preset".into())),
            }
        }
        Command::Sweep { config, common } => {
            set_jobs(common.jobs)?;
            let cfg = sweep::load(&read_text(&config)?, common.seed)?;
            sweep::sweep(&cfg, &out_dir(common.out))
        }
        Command::Catalog { format } => {
            print!("{}", catalog::render(format));
            Ok(Status::Pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("bcklab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
