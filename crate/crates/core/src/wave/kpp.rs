// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{Grid, KineticParams, WaveError};

/// Relative slack on the CFL comparison, for limits computed in another
/// order of operations.
const CFL_SLACK: f64 = 1e-12;
/// Rounding slack on `f0 >= 0`.
const F0_SLACK: f64 = 1e-12;

fn check_cfl(grid: &Grid, params: &KineticParams, dt: f64) -> Result<(), WaveError> {
    let limit = grid.cfl_limit(params);
    if !(dt > 0.0) || dt > limit * (1.0 + CFL_SLACK) {
        return Err(WaveError::Cfl { dt, limit });
    }
    Ok(())
}

fn check_range(f: &[f64]) -> Result<(), WaveError> {
    match f.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(cell) => Err(WaveError::OutOfRange {
            cell,
            value: f[cell],
        }),
        None => Ok(()),
    }
}

/// No-flux discrete Laplacian at cell `i`: missing neighbours mirror the cell.
fn laplacian(f: &[f64], grid: &Grid, i: usize, coord: &[usize]) -> f64 {
    let mut sum = 0.0;
    for axis in 0..grid.dims {
        let s = grid.stride(axis);
        let c = coord[axis];
        let lo = if c > 0 { f[i - s] } else { f[i] };
        let hi = if c + 1 < grid.cells[axis] {
            f[i + s]
        } else {
            f[i]
        };
        sum += lo - 2.0 * f[i] + hi;
    }
    sum / (grid.spacing * grid.spacing)
}

fn explicit_step(
    f: &[f64],
    grid: &Grid,
    params: &KineticParams,
    dt: f64,
    growth: impl Fn(usize, f64) -> f64,
) -> Vec<f64> {
    let mut coord = vec![0usize; grid.dims];
    let mut out = Vec::with_capacity(f.len());
    for (i, &v) in f.iter().enumerate() {
        let lap = laplacian(f, grid, i, &coord);
        let next = v + dt * (params.d_coeff * lap + growth(i, v));
        out.push(next.clamp(0.0, 1.0));
        for (a, c) in coord.iter_mut().enumerate() {
            *c += 1;
            if *c < grid.cells[a] {
                break;
            }
            *c = 0;
        }
    }
    out
}

/// One explicit Euler step of `D lap f + f (1 - f) / tau`, clamped to [0, 1].
pub fn kpp_step(
    f: &[f64],
    grid: &Grid,
    params: &KineticParams,
    dt: f64,
) -> Result<Vec<f64>, WaveError> {
    check_cfl(grid, params, dt)?;
    check_range(f)?;
    let tau = params.tau;
    Ok(explicit_step(f, grid, params, dt, |_, v| {
        v * (1.0 - v) / tau
    }))
}

/// Diffusion only. Cell values are not clamped, so mass is conserved.
pub fn diffusion_step(
    f: &[f64],
    grid: &Grid,
    params: &KineticParams,
    dt: f64,
) -> Result<Vec<f64>, WaveError> {
    check_cfl(grid, params, dt)?;
    let mut coord = vec![0usize; grid.dims];
    let mut out = Vec::with_capacity(f.len());
    for (i, &v) in f.iter().enumerate() {
        out.push(v + dt * params.d_coeff * laplacian(f, grid, i, &coord));
        for (a, c) in coord.iter_mut().enumerate() {
            *c += 1;
            if *c < grid.cells[a] {
                break;
            }
            *c = 0;
        }
    }
    Ok(out)
}

/// Per-channel fields `f_k` together with `f0 = 1 - sum_k p_k f_k`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalarFieldSet {
    pub grid: Grid,
    pub f: Vec<Vec<f64>>,
    pub f0: Vec<f64>,
    pub p_ref: Vec<f64>,
}

impl ScalarFieldSet {
    pub fn new(grid: Grid, f: Vec<Vec<f64>>, p_ref: Vec<f64>) -> Result<Self, WaveError> {
        if f.len() != p_ref.len() {
            return Err(WaveError::Mismatch(format!(
                "{} fields for {} channels",
                f.len(),
                p_ref.len()
            )));
        }
        for fk in &f {
            if fk.len() != grid.len() {
                return Err(WaveError::Mismatch(format!(
                    "field of {} cells on a {}-cell grid",
                    fk.len(),
                    grid.len()
                )));
            }
            check_range(fk)?;
        }
        let mut set = Self {
            f0: vec![0.0; grid.len()],
            grid,
            f,
            p_ref,
        };
        set.refresh_f0()?;
        Ok(set)
    }

    /// Every channel at the same uniform level.
    pub fn uniform(grid: Grid, level: f64, p_ref: Vec<f64>) -> Result<Self, WaveError> {
        let f = vec![vec![level; grid.len()]; p_ref.len()];
        Self::new(grid, f, p_ref)
    }

    pub fn channels(&self) -> usize {
        self.f.len()
    }

    /// Recomputes `f0` from the current fields and `p_ref`.
    pub fn refresh_f0(&mut self) -> Result<(), WaveError> {
        for i in 0..self.f0.len() {
            let mut occupied = 0.0;
            for (fk, &p) in self.f.iter().zip(&self.p_ref) {
                occupied += p * fk[i];
            }
            let f0 = 1.0 - occupied;
            if f0 < -F0_SLACK {
                return Err(WaveError::Constraint { cell: i, f0 });
            }
            self.f0[i] = f0.clamp(0.0, 1.0);
        }
        Ok(())
    }

    /// Replaces `p_ref` (after slips) and recomputes `f0`.
    pub fn set_probabilities(&mut self, p: &[f64]) -> Result<(), WaveError> {
        if p.len() != self.channels() {
            return Err(WaveError::Mismatch(format!(
                "{} probabilities for {} channels",
                p.len(),
                self.channels()
            )));
        }
        self.p_ref.clear();
        self.p_ref.extend_from_slice(p);
        self.refresh_f0()
    }
}

/// Advances every live channel with growth `f_k f0 / tau`, `f0` taken from
/// the start of the step. Channels with `p_k = 0` are frozen.
pub fn coupled_step(
    fields: &ScalarFieldSet,
    params: &KineticParams,
    dt: f64,
) -> Result<ScalarFieldSet, WaveError> {
    let grid = &fields.grid;
    check_cfl(grid, params, dt)?;
    let tau = params.tau;
    let f0 = &fields.f0;
    let f = fields
        .f
        .iter()
        .zip(&fields.p_ref)
        .map(|(fk, &p)| {
            if p == 0.0 {
                fk.clone()
            } else {
                explicit_step(fk, grid, params, dt, |i, v| v * f0[i] / tau)
            }
        })
        .collect();
    let mut next = ScalarFieldSet {
        grid: grid.clone(),
        f,
        f0: vec![0.0; grid.len()],
        p_ref: fields.p_ref.clone(),
    };
    next.refresh_f0()?;
    Ok(next)
}
