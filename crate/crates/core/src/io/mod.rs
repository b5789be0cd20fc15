// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, experiment orchestration and outputs.

mod config;
mod experiment;
mod plot;

pub use config::{
    load_config, CompareSettings, ConfigError, ExactSettings, ExperimentConfig, Formats,
    FpSettings, Mode, SeedRange, TimescaleSettings, WaveSettings,
};
pub use experiment::{
    csv_text, fmt_f64, read_manifest, run_experiment, OutputRecord, RunManifest, RunRecord,
    RunStatus, MANIFEST_NAME,
};
pub use plot::{emit_plot, PlotError, PlotKind};
