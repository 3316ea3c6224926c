use std::process::ExitCode;

use clap::Parser;
use nxp_cli::{run, Cli, Io};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse(), Io::std()))
}
