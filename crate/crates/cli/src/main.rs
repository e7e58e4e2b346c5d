use std::process::ExitCode;

use clap::Parser;
use dqwalk::config::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = RunConfig::from_cli(&cli).and_then(|cfg| dqwalk::execute(&cfg));
    match status {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dqwalk: {e}");
            ExitCode::from(2)
        }
    }
}
