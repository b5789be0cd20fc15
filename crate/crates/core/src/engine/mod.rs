// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Slips in coherence and the random walk of channel probabilities.
//!
//! An incoherent collision between an atom entangled with channel `j` and a
//! free atom moves a little probability into or out of channel `j`. Slips are
//! drawn as Poisson events per cell, channel and sign; the resulting walk
//! is a martingale that ends with one channel holding all the probability.

mod born;
mod params;
mod probs;
mod run;
mod slips;
mod timescale;

pub use born::{born_statistics, wilson_interval, winner_statistics, BornStatistics, MIN_RUNS};
pub use params::{CollisionRate, SlipParams, W_CEILING};
pub use probs::ChannelProbabilities;
pub use run::{
    run_collapse, run_collapse_stream, run_ensemble, CollapseConfig, FieldInit, PartialRun,
    RunResult, TrajectoryPoint,
};
pub(crate) use slips::field_integrals as slips_field_integrals;
pub use slips::{
    apply_slips, microstep, sample_slips, slip_delta, theoretical_moments, Moments, Sign,
    SlipEvent, SlipSample, MEAN_WARNING,
};
pub use timescale::estimate_collapse_time;

use thiserror::Error;

use crate::wave::WaveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid slip parameters: {0}")]
    InvalidParams(String),
    #[error("invalid channel probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("every channel was absorbed in the same step")]
    Degenerate,
    #[error("no absorption within {} steps (t = {:.6e})", .0.steps, .0.time)]
    Timeout(Box<PartialRun>),
    #[error(transparent)]
    Field(#[from] WaveError),
    #[error("cannot aggregate runs: {0}")]
    Aggregation(String),
}
