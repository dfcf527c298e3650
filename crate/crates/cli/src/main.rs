use std::process::ExitCode;

use atomphoton::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("atomphoton: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
