mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Run};

#[derive(Debug)]
pub enum CliError {
    Core(discord_core::Error),
    Io(std::io::Error),
    Config(String),
    Numerical(String),
}

impl From<discord_core::Error> for CliError {
    fn from(e: discord_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_invalid_input() => 2,
            CliError::Config(_) => 2,
            CliError::Core(_) | CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Config(m) | CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

/// Reads the recorded run from a metadata file written by an earlier
/// invocation.
fn load_run(path: &PathBuf) -> Result<Run, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{} is not JSON: {e}", path.display())))?;
    let run = v.get("run").cloned().ok_or_else(|| CliError::Config(format!("{} has no recorded run", path.display())))?;
    serde_json::from_value(run).map_err(|e| CliError::Config(format!("invalid recorded run in {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| {
        if let Some(w) = cli.workers {
            if w == 0 {
                return Err(CliError::Config("--workers must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
        }
        let run = match (&cli.config, cli.command.clone()) {
            (Some(path), None) => load_run(path)?,
            (None, Some(cmd)) => Run::new(cli.seed, cli.format, cmd),
            (Some(_), Some(_)) => return Err(CliError::Config("--config replaces the subcommand; give one or the other".into())),
            (None, None) => return Err(CliError::Config("a subcommand or --config is required (see --help)".into())),
        };
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
        commands::run(&run, &out)
    })();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
