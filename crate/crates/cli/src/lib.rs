//! Command-line harness for `dqwalk-core`: configuration, tabular output,
//! figure data and the acceptance checks.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod verify;

use std::path::Path;

use config::{Command, RunConfig};
use error::Result;

/// Runs one command and returns the process exit status.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    let out = cfg.output_path.as_deref();
    match cfg.command {
        Command::Distribution => commands::distribution(cfg)?.emit(cfg.format, out)?,
        Command::Moments => commands::moments_table(cfg)?.emit(cfg.format, out)?,
        Command::Converge => commands::converge(cfg)?.emit(cfg.format, out)?,
        Command::Mc => commands::mc(cfg)?.emit(cfg.format, out)?,
        Command::Figures => figures::write_all(out.unwrap_or(Path::new(".")), cfg.format)?,
        Command::Verify => {
            let reports = verify::run_all(cfg.fast);
            let failed = reports.iter().filter(|r| r.verdict == verify::Verdict::Fail).count();
            let skipped = reports.iter().filter(|r| r.verdict == verify::Verdict::Skipped).count();
            println!(
                "{} passed, {failed} failed, {skipped} skipped",
                reports.len() - failed - skipped
            );
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}
