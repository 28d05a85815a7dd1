//! `iteqd`: map creation, adaptation, variant benchmarks and trajectory
//! descriptors from the command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

mod adapt;
mod bench;
mod cli;
mod descriptors;
mod error;
mod map;
mod settings;

use std::process::ExitCode;

use clap::Parser;

use cli::{AdaptCommand, BenchCommand, Cli, Command, DescriptorsCommand, MapCommand};
use error::CliResult;

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Map(MapCommand::Create(a)) => map::create(a),
        Command::Map(MapCommand::Stats(a)) => map::stats(a),
        Command::Map(MapCommand::Export(a)) => map::export(a),
        Command::Adapt(AdaptCommand::Run(a)) => adapt::run(a),
        Command::Bench(BenchCommand::Variants(a)) => bench::variants(a),
        Command::Descriptors(DescriptorsCommand::Compute(a)) => descriptors::compute(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
