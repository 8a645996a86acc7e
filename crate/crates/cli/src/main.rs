use std::io::Write;
use std::process::ExitCode;

use bsq_cli::{error_document, run, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let name = config.command.name();
    let outcome = match run(&config) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprint!("{}", error_document(Some(name), &err));
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &outcome.document),
        None => std::io::stdout().write_all(outcome.document.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("bsq: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.exit_code as u8)
}
