use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use stableprod_cli::args::Cli;
use stableprod_cli::error::{CliError, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "{}",
                CliError::Config(first.trim_start_matches("error: ").to_string()).record()
            );
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match stableprod_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
