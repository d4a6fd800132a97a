use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use nctoric::cli::{render, run, usage_error, RunConfig};

fn main() -> ExitCode {
    let outcome = match RunConfig::try_parse() {
        Ok(cfg) => {
            let mut outcome = run(&cfg);
            if let Some(path) = &cfg.out {
                if let Err(e) = std::fs::write(path, render(&outcome.report)) {
                    outcome = usage_error(&format!("cannot write {}: {e}", path.display()));
                } else {
                    for line in &outcome.diagnostics {
                        eprintln!("{line}");
                    }
                    return ExitCode::from(outcome.code as u8);
                }
            }
            outcome
        }
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => usage_error(e.to_string().trim_end()),
    };
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    print!("{}", render(&outcome.report));
    ExitCode::from(outcome.code as u8)
}
