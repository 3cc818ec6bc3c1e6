use clap::Parser;
use std::process::ExitCode;

use twinkernel_cli::{run, Cli, Outcome, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let files = match &outcome {
                Outcome::Success { files } | Outcome::VerificationFailed { files, .. } => files,
            };
            for f in files {
                println!("wrote {}", f.display());
            }
            if let Outcome::VerificationFailed { failures, .. } = &outcome {
                for f in failures {
                    eprintln!("FAILED {f}");
                }
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
