use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use irsmec::sim::{self, OutputFormat, ScenarioConfig};
use irsmec::Error;

#[derive(Parser)]
#[command(
    name = "irsmec",
    version,
    about = "Delay-optimal scheduling for IRS-aided two-user edge computing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write aggregated rows.
    Run {
        /// Config file or preset name.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Overrides the configured worker count.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the configured number of trials.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Compare the closed forms with the brute-force oracles.
    Certify {
        /// Config file or preset name.
        #[arg(long)]
        config: String,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List or print the shipped scenario presets.
    Presets {
        #[arg(long)]
        list: bool,
        /// Print the JSON of one preset.
        #[arg(long)]
        show: Option<String>,
    },
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Io { .. } => 3,
        _ => 1,
    }
}

fn load(source: &str) -> Result<ScenarioConfig, Error> {
    let mut config = ScenarioConfig::load(source)?;
    config.apply_env_seed()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            workers,
            trials,
        } => {
            let mut config = load(&config)?;
            if workers.is_some() {
                config.workers = workers;
            }
            if let Some(t) = trials {
                config.trials = t;
            }
            let rows = sim::run_experiment(&config)?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            sim::emit_results(&rows, format, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(0)
        }
        Command::Certify { config, instances, out } => {
            if instances == 0 {
                return Err(Error::Config {
                    path: "--instances".into(),
                    message: "must be >= 1".into(),
                });
            }
            let config = load(&config)?;
            let report = sim::certify(&config, instances)?;
            println!("{report}");
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Serialization(e.to_string()))?;
                std::fs::write(&path, text + "\n").map_err(|e| Error::Io { path, source: e })?;
            }
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::Presets { list, show } => {
            if let Some(name) = show {
                let text = sim::preset(&name).ok_or_else(|| Error::Config {
                    path: "--show".into(),
                    message: format!("unknown preset {name:?}"),
                })?;
                print!("{text}");
            } else {
                let _ = list;
                for name in sim::preset_names() {
                    println!("{name}");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
