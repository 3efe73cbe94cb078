//! `revineq`: random soundness campaigns, equality witnesses, sharpness
//! sweeps and integral checks for the reverse triangle and reverse Schwarz
//! inequalities.
//!
//! Exit codes: 0 all checks passed, 1 a certificate was violated (or a
//! consistency check failed), 2 usage or configuration error, 3 infeasible
//! hypothesis under `--strict-feasibility`.

mod args;
mod commands;
mod config_file;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::Exit;

fn main() -> ExitCode {
    let argv = match config_file::expand_config(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(err) => {
            eprintln!("revineq: {err}");
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    // clap exits with 2 on usage errors and 0 for --help
    let cli = Cli::parse_from(argv);
    let exit = match commands::execute(cli.command) {
        Ok(exit) => exit,
        Err(err) => {
            eprintln!("revineq: {err}");
            Exit::for_error(&err)
        }
    };
    ExitCode::from(exit as u8)
}
