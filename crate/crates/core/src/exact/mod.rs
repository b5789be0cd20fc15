// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact branch dynamics for a few atoms on a lattice.
//!
//! A branch is labelled by an LE word: one letter per atom, `0` for an atom
//! that has not been touched by the measured system and `k` for an atom
//! entangled with channel `k`. The contagion Hamiltonian `H'` moves amplitude
//! between branches but never from a nonzero letter back to `0`, and the sum
//! over branches evolves under the ordinary Hamiltonian.

mod contagion;
mod hamiltonian;
mod model;
mod state;

pub use contagion::{ContagionMatrices, LabelOp, Mat2};
pub use hamiltonian::{build_le_hamiltonian, standard_hamiltonian, LeHamiltonian, SparseMatrix};
pub use model::{Basis, LatticeModel, Statistics, DEFAULT_BASIS_CAP};
pub use state::{
    evolve, evolve_observed, le_occupation, local_probabilities, reconstruct_standard, BranchState,
    LocalProbabilities,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("invalid lattice model: {0}")]
    InvalidModel(String),
    #[error(
        "basis of {required} states exceeds the cap of {cap}; raise the cap to at least {required}"
    )]
    BasisTooLarge { required: usize, cap: usize },
    #[error(
        "step dt = {dt} is outside the RK4 stability region (dt * |H'| = {product:.3} > {limit})"
    )]
    StepTooLarge { dt: f64, product: f64, limit: f64 },
    #[error("integrator diverged at step {step}: norm drift {drift:e} exceeds 1e-6")]
    Divergence { step: usize, drift: f64 },
    #[error("local probabilities undefined: expected atom count in cell is {0:e}")]
    EmptyCell(f64),
    #[error("bad initial state: {0}")]
    BadState(String),
}
