// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use super::{apply_slips, sample_slips, ChannelProbabilities, EngineError, SlipParams};
use crate::rng::stream_rng;
use crate::wave::{coupled_step, seed_field, Grid, KineticParams, Region, ScalarFieldSet};

/// Initial LE fields.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum FieldInit {
    /// Every channel at the same level everywhere.
    Uniform(f64),
    /// One seed region per channel, 1 inside and 0 outside.
    Seeded(Vec<Region>),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CollapseConfig {
    pub grid: Grid,
    pub kinetic: KineticParams,
    pub slip: SlipParams,
    pub p0: ChannelProbabilities,
    pub fields: FieldInit,
    pub dt: f64,
    pub max_steps: usize,
    pub record_trajectory: bool,
    /// Skip the field update, keeping the initial fields for the whole run.
    pub static_fields: bool,
}

impl CollapseConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        self.slip.validate()?;
        if self.p0.len() < 2 {
            return Err(EngineError::InvalidParams(
                "a collapse run needs K >= 2".into(),
            ));
        }
        if !(self.dt > 0.0) || self.dt > self.kinetic.tau {
            return Err(EngineError::InvalidParams(format!(
                "dt must lie in (0, tau], got {}",
                self.dt
            )));
        }
        if let FieldInit::Seeded(r) = &self.fields {
            if r.len() != self.p0.len() {
                return Err(EngineError::InvalidParams(format!(
                    "{} seed regions for {} channels",
                    r.len(),
                    self.p0.len()
                )));
            }
        }
        Ok(())
    }

    /// Step at which the largest per-cell slip mean of the initial fields
    /// equals `target`.
    pub fn dt_for_mean(
        grid: &Grid,
        slip: &SlipParams,
        fields: &ScalarFieldSet,
        target: f64,
    ) -> Result<f64, EngineError> {
        let weight =
            slip.collision_rate_per_cell * grid.cell_volume() / slip.cell_volume * slip.w / 2.0;
        let peak = fields
            .f
            .iter()
            .flat_map(|fj| fj.iter().zip(&fields.f0).map(|(a, b)| a * b))
            .fold(0.0, f64::max);
        if !(weight * peak > 0.0) || !(target > 0.0) {
            return Err(EngineError::InvalidParams(
                "no slips possible: cannot size dt from the slip mean".into(),
            ));
        }
        Ok(target / (weight * peak))
    }

    pub fn initial_fields(&self) -> Result<ScalarFieldSet, EngineError> {
        let p = self.p0.as_slice().to_vec();
        let set = match &self.fields {
            FieldInit::Uniform(level) => ScalarFieldSet::uniform(self.grid.clone(), *level, p)?,
            FieldInit::Seeded(regions) => {
                let f = regions
                    .iter()
                    .map(|r| seed_field(&self.grid, r))
                    .collect::<Result<Vec<_>, _>>()?;
                ScalarFieldSet::new(self.grid.clone(), f, p)?
            }
        };
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunResult {
    /// Index into `p` of the surviving channel.
    pub winner: usize,
    pub collapse_time: f64,
    pub steps: usize,
    pub slip_count: u64,
    pub seed: u64,
    pub stream: u64,
    pub initial: Vec<f64>,
    /// Largest per-cell slip mean seen.
    pub max_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl RunResult {
    /// `p` after `step` steps; absorbed runs keep their final value.
    pub fn p_at_step(&self, step: usize) -> Option<&[f64]> {
        let t = self.trajectory.as_ref()?;
        t.get(step.min(t.len() - 1)).map(|pt| pt.p.as_slice())
    }
}

/// State of a run that did not absorb in time.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PartialRun {
    pub steps: usize,
    pub time: f64,
    pub slip_count: u64,
    pub seed: u64,
    pub stream: u64,
    pub p: Vec<f64>,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// [`run_collapse_stream`] on stream 0.
pub fn run_collapse(config: &CollapseConfig, seed: u64) -> Result<RunResult, EngineError> {
    run_collapse_stream(config, seed, 0)
}

/// Fields, then slips, once per step until a single channel survives.
pub fn run_collapse_stream(
    config: &CollapseConfig,
    seed: u64,
    stream: u64,
) -> Result<RunResult, EngineError> {
    config.validate()?;
    let mut rng = stream_rng(seed, stream);
    let mut fields = config.initial_fields()?;
    let mut p = config.p0.clone();
    let mut trajectory = config.record_trajectory.then(|| {
        vec![TrajectoryPoint {
            time: 0.0,
            p: p.as_slice().to_vec(),
        }]
    });
    let mut slip_count = 0u64;
    let mut max_mean: f64 = 0.0;
    let mut step = 0;
    while p.winner().is_none() {
        if step == config.max_steps {
            return Err(EngineError::Timeout(Box::new(PartialRun {
                steps: step,
                time: step as f64 * config.dt,
                slip_count,
                seed,
                stream,
                p: p.as_slice().to_vec(),
                trajectory,
            })));
        }
        if !config.static_fields {
            fields = coupled_step(&fields, &config.kinetic, config.dt)?;
        }
        let sample = sample_slips(&fields, &p, &config.slip, config.dt, &mut rng);
        max_mean = max_mean.max(sample.max_mean);
        slip_count += sample.events.iter().map(|e| e.count as u64).sum::<u64>();
        p = apply_slips(&p, &sample.events, &fields, &config.slip)?;
        fields.set_probabilities(p.as_slice())?;
        step += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push(TrajectoryPoint {
                time: step as f64 * config.dt,
                p: p.as_slice().to_vec(),
            });
        }
    }
    Ok(RunResult {
        winner: p.winner().expect("loop exits on a winner"),
        collapse_time: step as f64 * config.dt,
        steps: step,
        slip_count,
        seed,
        stream,
        initial: config.p0.as_slice().to_vec(),
        max_mean,
        trajectory,
    })
}

/// `runs` trajectories on streams `0..runs` of `seed`, in parallel. The
/// output order is the stream order.
pub fn run_ensemble(
    config: &CollapseConfig,
    seed: u64,
    runs: usize,
) -> Vec<Result<RunResult, EngineError>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|s| run_collapse_stream(config, seed, s))
        .collect()
}
