use clap::Parser;
use kahler_verify::cli::Cli;
use kahler_verify::run_cli;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
