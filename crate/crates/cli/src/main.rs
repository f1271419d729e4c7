//! Batch experiment runner: meshes, groupoid-valued fields, variational
//! solvers, and gauge diagnostics driven by a TOML configuration.
//!
//! Subcommands:
//!   run    solve the configured problem and emit CSV/JSON artifacts
//!   check  run the seeded invariant suites and report defects
//!   mesh   generate/inspect a mesh
//!   gauge  flatness and holonomy diagnostics for a gauge field
//!
//! Flags: --config PATH, --seed N, --workers N, --out DIR.
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error.

mod commands;
mod config;

use std::process::ExitCode;

use config::ExperimentConfig;

const USAGE: &str = "usage: varfield <run|check|mesh|gauge> [--config PATH] [--seed N] [--workers N] [--out DIR]";

struct CliArgs {
    command: String,
    config_path: Option<String>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<String>,
}

fn parse_args(mut args: std::env::Args) -> Result<CliArgs, String> {
    args.next(); // program name
    let command = args.next().ok_or_else(|| USAGE.to_string())?;
    let mut parsed = CliArgs {
        command,
        config_path: None,
        seed: None,
        workers: None,
        out: None,
    };
    while let Some(flag) = args.next() {
        let mut value = || {
            args.next()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => parsed.config_path = Some(value()?),
            "--seed" => {
                parsed.seed = Some(value()?.parse().map_err(|e| format!("--seed: {e}"))?)
            }
            "--workers" => {
                parsed.workers = Some(value()?.parse().map_err(|e| format!("--workers: {e}"))?)
            }
            "--out" => parsed.out = Some(value()?),
            other => return Err(format!("unknown flag {other}\n{USAGE}")),
        }
    }
    Ok(parsed)
}

fn load_config(args: &CliArgs) -> Result<ExperimentConfig, String> {
    let mut config = match &args.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {path}: {e}"))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::from_toml("")?,
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(workers) = args.workers {
        config.workers = workers.max(1);
    }
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = match parse_args(std::env::args()) {
        Ok(args) => args,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };
    let config = match load_config(&args) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };
    let outcome = match args.command.as_str() {
        "run" => commands::run(&config),
        "check" => commands::check(&config),
        "mesh" => commands::mesh(&config),
        "gauge" => commands::gauge(&config),
        other => {
            eprintln!("unknown command {other}\n{USAGE}");
            return ExitCode::from(2);
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CommandError::Config(message)) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
        Err(commands::CommandError::Runtime(message)) => {
            eprintln!("{message}");
            ExitCode::from(1)
        }
    }
}
