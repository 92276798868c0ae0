use std::process::ExitCode;

use clap::Parser;
use prepdiag::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
