use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dogforge::cli::Cli;
use dogforge::commands::run;
use dogforge::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("{}", CliError::usage(e.kind().to_string()).record());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(summary) => {
            print_json(&summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(r) = &e.report {
                print_json(r);
            }
            eprintln!("{}", e.record());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}

/// A closed stdout (e.g. piped into `head`) is not an error worth a panic.
fn print_json(v: &serde_json::Value) {
    let text = serde_json::to_string_pretty(v).expect("summary serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
