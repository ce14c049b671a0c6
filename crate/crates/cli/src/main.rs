use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use telu_lab_cli::{run, Cli, CliError};

fn emit(cli: &Cli, document: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, document)?,
        None => std::io::stdout().lock().write_all(document.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|rendered| {
        emit(&cli, &rendered.document)?;
        match rendered.numerical_failure {
            Some(msg) => Err(CliError::Numerical(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("telu-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
