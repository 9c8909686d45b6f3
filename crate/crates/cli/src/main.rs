use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use spectra_cli::args::{Cli, UsageError};
use spectra_cli::commands;
use spectra_cli::render::error_json;

/// Exit codes: 0 success, 1 computational failure (budget, degenerate
/// input, failed acceptance run), 2 usage error (bad flags or grammar).
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            println!("{}", error_json(&e.to_string(), 2));
            return ExitCode::from(2);
        }
    };
    match commands::dispatch(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.exit)
        }
        Err(err) => {
            let exit = classify(&err);
            eprintln!("{err:#}");
            println!("{}", error_json(&format!("{err:#}"), i32::from(exit)));
            ExitCode::from(exit)
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<spectra_core::Error>() {
        return match e {
            spectra_core::Error::Parse(_) => 2,
            _ => 1,
        };
    }
    1
}
