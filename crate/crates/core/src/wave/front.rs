// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{kpp_step, seed_field, Grid, KineticParams, Region, WaveError};

/// History before `TRANSIENT` mean free times is ignored by the speed fit.
pub const TRANSIENT: f64 = 10.0;
/// Minimum history span, in mean free times, after the transient.
pub const MIN_SPAN: f64 = 20.0;

/// Outermost crossing of `level` along `axis`, on the line of cells through
/// `through` (its `axis` component is ignored). Positions are measured from
/// the low wall, with values at cell centres and linear interpolation.
pub fn front_position(
    f: &[f64],
    grid: &Grid,
    level: f64,
    axis: usize,
    through: &[usize],
) -> Result<f64, WaveError> {
    let n = grid.cells[axis];
    let stride = grid.stride(axis);
    let mut start = through.to_vec();
    start[axis] = 0;
    let base = grid.index(&start);
    let at = |i: usize| f[base + i * stride];
    for i in (0..n.saturating_sub(1)).rev() {
        let (a, b) = (at(i), at(i + 1));
        if a != b && (a - level) * (b - level) <= 0.0 {
            return Ok(grid.center(i) + (level - a) / (b - a) * grid.spacing);
        }
    }
    Err(WaveError::FrontUndefined { level })
}

/// Distance between the 0.1 and 0.9 level crossings.
pub fn front_width(
    f: &[f64],
    grid: &Grid,
    axis: usize,
    through: &[usize],
) -> Result<f64, WaveError> {
    Ok(front_position(f, grid, 0.1, axis, through)? - front_position(f, grid, 0.9, axis, through)?)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FrontSpeed {
    pub speed: f64,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
    pub v_kpp: f64,
    pub v_sound: f64,
    pub samples: usize,
}

/// Least-squares slope of position against time, after dropping the first
/// `TRANSIENT` mean free times.
pub fn front_speed(
    history: &[(f64, f64)],
    params: &KineticParams,
) -> Result<FrontSpeed, WaveError> {
    let t0 = history.first().map_or(0.0, |h| h.0) + TRANSIENT * params.tau;
    let kept: Vec<(f64, f64)> = history.iter().copied().filter(|&(t, _)| t >= t0).collect();
    let span = match (kept.first(), kept.last()) {
        (Some(a), Some(b)) => (b.0 - a.0) / params.tau,
        _ => 0.0,
    };
    if kept.len() < 2 || span < MIN_SPAN * (1.0 - 1e-9) {
        return Err(WaveError::UnderDetermined {
            span,
            needed: MIN_SPAN,
        });
    }
    let n = kept.len() as f64;
    let mt = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = kept.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stx: f64 = kept.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let speed = stx / stt;
    let rss: f64 = kept
        .iter()
        .map(|p| (p.1 - mx - speed * (p.0 - mt)).powi(2))
        .sum();
    Ok(FrontSpeed {
        speed,
        residual: (rss / n).sqrt(),
        v_kpp: params.kpp_speed(),
        v_sound: params.sound_speed(),
        samples: kept.len(),
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FrontSample {
    pub time: f64,
    pub position: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontRun {
    pub history: Vec<FrontSample>,
    pub field: Vec<f64>,
    pub speed: Result<FrontSpeed, WaveError>,
}

/// Single-channel front from `region`, tracked along axis 0 through the
/// seed's centroid cell, recording every `record_every` steps.
pub fn run_front(
    grid: &Grid,
    params: &KineticParams,
    region: &Region,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Result<FrontRun, WaveError> {
    grid.check_resolution(params)?;
    let mut f = seed_field(grid, region)?;
    let through = centroid(grid, &f);
    let every = record_every.max(1);
    let mut history = Vec::new();
    let mut record = |step: usize, f: &[f64]| -> Result<(), WaveError> {
        let position = front_position(f, grid, 0.5, 0, &through)?;
        let width = front_width(f, grid, 0, &through)?;
        history.push(FrontSample {
            time: step as f64 * dt,
            position,
            width,
        });
        Ok(())
    };
    record(0, &f)?;
    for step in 1..=steps {
        f = kpp_step(&f, grid, params, dt)?;
        if step % every == 0 || step == steps {
            record(step, &f)?;
        }
    }
    let pairs: Vec<(f64, f64)> = history.iter().map(|s| (s.time, s.position)).collect();
    let speed = front_speed(&pairs, params);
    Ok(FrontRun {
        history,
        field: f,
        speed,
    })
}

fn centroid(grid: &Grid, f: &[f64]) -> Vec<usize> {
    let mass: f64 = f.iter().sum();
    let mut acc = vec![0.0; grid.dims];
    for (i, &v) in f.iter().enumerate() {
        for (a, c) in grid.coords(i).into_iter().enumerate() {
            acc[a] += v * c as f64;
        }
    }
    acc.iter().map(|s| (s / mass).round() as usize).collect()
}
