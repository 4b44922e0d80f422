//! `fracdiff`: stretched-Gaussian densities, solvers, walkers and quantum
//! relations of fractal-fabric diffusion from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use config::Cli;
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Missing { command, flag }) => {
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(command)
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            eprintln!("error: the following required argument was not provided: {flag}\n\n{usage}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
