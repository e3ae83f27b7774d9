//! `warpgeo`: command-line front end emitting CSV or JSON tables.

mod args;
mod commands;
mod input;
mod report;
mod table;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;
use warpgeo::models::ModelRegistry;
use warpgeo::{Error, Result};

use args::Cli;

const OUT_DIR_VAR: &str = "WARPGEO_OUT_DIR";

fn output_path(path: &PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.clone(),
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let registry = ModelRegistry::builtin();
    let model = cli.common.model.as_deref().map(|name| registry.get(name)).transpose()?;
    let table = commands::run(&cli.command, model.clone(), cli.common.seed, &registry)?;
    table.check_finite()?;
    let meta = json!({
        "model": model.as_ref().map(|m| m.name()),
        "seed": cli.common.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "rows": table.len(),
    });
    let text = table.render(cli.common.format, meta);
    match &cli.common.output {
        Some(path) => {
            let path = output_path(path);
            fs::write(&path, text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            report::argument_error(message.lines().next().unwrap_or_default().trim_start_matches("error: "));
            return ExitCode::from(report::EXIT_INPUT as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report::error(&e);
            ExitCode::from(report::exit_code(&e) as u8)
        }
    }
}
