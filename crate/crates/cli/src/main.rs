mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Build(a) => commands::build(a),
        Command::Centrality(a) => commands::centrality(a),
        Command::Surcharge(a) => commands::surcharge(a),
        Command::Diffusion(a) => commands::diffusion(a),
        Command::Timescale(a) => commands::timescale(a),
        Command::Factors(a) => commands::factors(a),
        Command::Generate(a) => commands::generate(a),
        Command::Export(a) => commands::export(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("ERROR {}: {message}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
