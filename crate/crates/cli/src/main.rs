//! `driven-tls`: figure data for driven two-level and multi-level systems as
//! CSV and JSON files, each run documented by a `manifest.json`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult, EXIT_USAGE};

fn replay(a: &args::ReplayArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.manifest)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.manifest.display())))?;
    let manifest: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.manifest.display())))?;
    let argv: Vec<String> = manifest["argv"]
        .as_array()
        .and_then(|v| v.iter().map(|s| s.as_str().map(String::from)).collect())
        .ok_or_else(|| CliError::Input(format!("{} has no argv list", a.manifest.display())))?;
    if argv.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Input("a replay manifest cannot be replayed".into()));
    }
    let mut full = vec!["driven-tls".to_string()];
    full.extend(argv);
    if let Some(out) = &a.out {
        full.extend(["--out".to_string(), out.display().to_string()]);
    }
    let cli = Cli::try_parse_from(full).map_err(|e| CliError::Usage(e.to_string()))?;
    dispatch(&cli.command)
}

fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::Spectrum(a) => commands::spectrum::run(a),
        Command::Dynamics(a) => commands::dynamics::run(a),
        Command::ScanPnd(a) => commands::scan::run(a),
        Command::Multilevel(a) => commands::multilevel::run(a),
        Command::Replay(a) => replay(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
