//! `idemconc` command-line front end.

mod commands;
mod output;

use clap::Parser;
use std::process::ExitCode;

use commands::Cli;

const EXIT_DOMAIN: u8 = 2;
const EXIT_INTERNAL: u8 = 1;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(commands::CliError::Library(e)) => {
            let object = output::error_object(&e);
            println!("{object}");
            eprintln!("error: {e}");
            if e.is_domain_error() {
                ExitCode::from(EXIT_DOMAIN)
            } else {
                ExitCode::from(EXIT_INTERNAL)
            }
        }
        Err(commands::CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
