//! Command-line front end: classification runs, evaluation, temporal
//! evolution, corpus synthesis, and benchmarking, each emitting a
//! manifest sufficient to reproduce the run bit for bit.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 domain error, 64 usage error.

mod args;
mod commands;
mod manifest;
mod settings;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = commands::dispatch(cli) {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}
