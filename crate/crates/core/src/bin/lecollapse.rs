// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lecollapse::io::{
    load_config, run_experiment, ConfigError, ExperimentConfig, Formats, Mode, SeedRange,
};
use lecollapse::Error;

/// Local-entanglement contagion and slip-driven collapse experiments.
#[derive(Parser)]
#[command(name = "lecollapse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact lattice evolution of the branch-resolved wavefunction.
    Exact(Common),
    /// Single-channel reaction-diffusion front.
    Wave(Common),
    /// Collapse trajectories, one per seed.
    Collapse(Common),
    /// Density evolution on the probability simplex.
    Fp(Common),
    /// Collapse over a seed range with winner statistics.
    Sweep(Common),
    /// Density against a matched collapse ensemble.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (key = value lines).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Half-open range, e.g. 0..100.
    #[arg(long, value_name = "A..B")]
    seeds: Option<SeedRange>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_name = "LIST")]
    formats: Option<Formats>,
    /// Log p after every step.
    #[arg(long)]
    trajectory: bool,
    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,
}

fn resolve(mode: Mode, args: Common) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::defaults(),
    };
    if let Some(m) = config.mode.filter(|&m| m != mode) {
        log::warn!("config mode `{m}` overridden by subcommand `{mode}`");
    }
    config.mode = Some(mode);
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.seeds.is_some() {
        config.seeds = args.seeds;
    }
    if let Some(o) = args.out {
        config.out = o;
    }
    if let Some(f) = args.formats {
        config.formats = f;
    }
    config.trajectory |= args.trajectory;
    if let Some(n) = args.max_steps {
        if n == 0 {
            return Err(ConfigError::Invalid {
                key: "--max-steps".into(),
                line: None,
                constraint: "must be at least 1".into(),
            });
        }
        config.collapse.max_steps = n;
    }
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Exact(a) => (Mode::Exact, a),
        Command::Wave(a) => (Mode::Wave, a),
        Command::Collapse(a) => (Mode::Collapse, a),
        Command::Fp(a) => (Mode::Fp, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Compare(a) => (Mode::Compare, a),
    };
    let result = resolve(mode, args)
        .map_err(Error::from)
        .and_then(|c| run_experiment(&c).map(|m| (c, m)));
    match result {
        Ok((config, manifest)) => {
            println!(
                "{mode}: {} outputs in {}, config {}",
                manifest.outputs.len(),
                config.out.display(),
                &manifest.config_hash[..12]
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lecollapse {mode}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
