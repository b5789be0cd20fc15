// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation toolkit for local-entanglement (LE) contagion and the
//! slip-driven random walk of channel probabilities.
//!
//! The crate is organised by model scale:
//!
//! * [`exact`]: branch vectors of a small lattice gas under the non-Hermitian
//!   contagion Hamiltonian.
//! * [`wave`]: coarse LE probability fields obeying a Fisher-KPP type
//!   diffusion-contagion equation.
//! * [`engine`]: Poisson slips in coherence acting on channel probabilities,
//!   run to absorption.
//! * [`fp`]: the Fokker-Planck limit of the slip process on the simplex.
//! * [`io`]: configuration, orchestration, outputs and plots.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod engine;
mod error;
pub mod exact;
pub mod fp;
pub mod io;
pub mod rng;
pub mod wave;

pub use error::{Error, Result};

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
