//! `lbd` command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid parameters, 3 for I/O failures.
//! Errors are reported as a single JSON line on stderr.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;

use args::{Cli, Command};
use error::{CliError, CliResult};
use output::{emit, Output};

fn resolve<T: Serialize + DeserializeOwned>(cli: &Cli, flags: &T) -> CliResult<T> {
    let name = cli.command.name();
    let config = cli.config.as_deref().map(|p| config::read_config(p, name)).transpose()?;
    config::merge(flags, config)
}

fn execute<T: Serialize + DeserializeOwned>(
    cli: &Cli,
    flags: &T,
    run: impl FnOnce(&T) -> CliResult<Output>,
) -> CliResult<Output> {
    let args = resolve(cli, flags)?;
    let out = run(&args)?;
    if let Some(path) = &cli.write_config {
        config::write_config(path, cli.command.name(), &args)?;
    }
    Ok(out)
}

fn run(cli: &Cli) -> CliResult<()> {
    let out = match &cli.command {
        Command::Rates(a) => execute(cli, a, commands::rates),
        Command::Stationary(a) => execute(cli, a, commands::stationary),
        Command::Limit(a) => execute(cli, a, commands::limit),
        Command::Simulate(a) => execute(cli, a, commands::simulate),
        Command::Converge(a) => execute(cli, a, commands::converge),
        Command::Lemma2(a) => execute(cli, a, commands::lemma2),
    }?;
    emit(cli.out.as_deref(), &out)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.line());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return fail(&CliError::param(first.trim_start_matches("error: ").to_string()));
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
