// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! The diffusion limit of the slip process: a Fokker-Planck equation
//! `dPhi/dt = sum_ab d_a d_b (D_ab Phi)` on the probability simplex, solved by
//! conservative finite volumes with `Phi = 0` on the boundary.
//!
//! Because every `D_ab` vanishes on the faces `p_j = 0`, the boundary
//! current vanishes too and the density never reaches the boundary. The
//! discrete engine, with finite jumps, does.

mod coeffs;
mod compare;
mod grid;
mod solver;

pub use coeffs::{diffusion_coefficients, CoefficientField, FieldSummary};
pub use compare::{compare_histogram, Comparison, Histogram};
pub use grid::{FPDensity, SimplexGrid};
pub use solver::{boundary_current, fp_step, stable_dt, BoundaryCurrent};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FpError {
    #[error("only K = 2 and K = 3 are supported, got K = {0}")]
    Unsupported(usize),
    #[error("invalid simplex grid: {0}")]
    InvalidGrid(String),
    #[error("dt = {dt} exceeds the explicit stability bound {limit}")]
    Unstable { dt: f64, limit: f64 },
    #[error("binning mismatch: {0}")]
    Binning(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
}
