// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::engine::EngineError;
use crate::exact::ExactError;
use crate::fp::FpError;
use crate::io::ConfigError;
use crate::wave::WaveError;

/// Crate-wide error, one variant per module plus I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit status for this error: 2 config, 3 numerical, 4 timeout.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Engine(EngineError::Timeout(_)) => 4,
            Error::Exact(_) | Error::Wave(_) | Error::Engine(_) | Error::Fp(_) => 3,
            Error::Io { .. } | Error::Output(_) => 1,
        }
    }
}
