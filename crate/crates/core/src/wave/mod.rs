// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! LE probability fields on a rectilinear grid.
//!
//! A single channel obeys `df/dt = D lap f + f (1 - f) / tau`, a Fisher-KPP
//! equation whose fronts travel at `2 sqrt(D / tau)`. Several channels share
//! the free fraction `f0 = 1 - sum_k p_k f_k`.

mod front;
mod grid;
mod kpp;

pub use front::{
    front_position, front_speed, front_width, run_front, FrontRun, FrontSample, FrontSpeed,
};
pub use grid::{seed_field, Grid, Region};
pub use kpp::{coupled_step, diffusion_step, kpp_step, ScalarFieldSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("invalid kinetic parameters: {0}")]
    InvalidParams(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid spacing {spacing} exceeds lambda/4 = {limit}")]
    Resolution { spacing: f64, limit: f64 },
    #[error("dt = {dt} violates the CFL bound dt <= h^2/(2 dims D) = {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("seed region does not intersect the grid")]
    EmptySeed,
    #[error("field value {value} at cell {cell} is outside [0, 1]")]
    OutOfRange { cell: usize, value: f64 },
    #[error("no crossing of level {level} along the axis profile")]
    FrontUndefined { level: f64 },
    #[error("speed fit needs {needed} tau of history after the transient, got {span}")]
    UnderDetermined { span: f64, needed: f64 },
    #[error("f0 = {f0:e} < 0 at cell {cell}")]
    Constraint { cell: usize, f0: f64 },
    #[error("field set mismatch: {0}")]
    Mismatch(String),
}

/// Mean free path, mean free time and the derived diffusion constant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KineticParams {
    pub lambda: f64,
    pub tau: f64,
    pub d_coeff: f64,
}

impl KineticParams {
    /// `D = lambda^2 / (6 tau)`.
    pub fn new(lambda: f64, tau: f64) -> Result<Self, WaveError> {
        if !(lambda > 0.0 && lambda.is_finite()) || !(tau > 0.0 && tau.is_finite()) {
            return Err(WaveError::InvalidParams(format!(
                "lambda and tau must be positive (lambda = {lambda}, tau = {tau})"
            )));
        }
        Ok(Self {
            lambda,
            tau,
            d_coeff: lambda * lambda / (6.0 * tau),
        })
    }

    /// Minimal Fisher-KPP front speed `2 sqrt(D / tau)`.
    pub fn kpp_speed(&self) -> f64 {
        2.0 * (self.d_coeff / self.tau).sqrt()
    }

    /// The sound-speed value `lambda / (sqrt(3) tau)`.
    pub fn sound_speed(&self) -> f64 {
        self.lambda / (3f64.sqrt() * self.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diffusion_constant() {
        let p = KineticParams::new(1.0, 1.0).unwrap();
        assert_eq!(p.d_coeff, 1.0 / 6.0);
        assert!((p.kpp_speed() - 0.816496580927726).abs() < 1e-15);
        assert!((p.sound_speed() - 0.5773502691896258).abs() < 1e-15);
        assert!(KineticParams::new(-1.0, 1.0).is_err());
        assert!(KineticParams::new(1.0, 0.0).is_err());
    }
}
