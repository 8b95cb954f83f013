use std::process::ExitCode;

use clap::Parser;
use hypiso_cli::{execute, render, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli);
    print!("{}", render(&outcome, cli.format));
    ExitCode::from(outcome.status as u8)
}
