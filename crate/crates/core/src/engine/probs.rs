// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::EngineError;

/// Tolerance on `sum p = 1` for externally supplied probabilities.
const INPUT_TOLERANCE: f64 = 1e-9;

/// A point `p` on the probability simplex.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct ChannelProbabilities(Vec<f64>);

impl ChannelProbabilities {
    /// Accepts nonnegative values summing to 1 within 1e-9 and renormalizes
    /// them.
    pub fn new(p: Vec<f64>) -> Result<Self, EngineError> {
        if p.is_empty() {
            return Err(EngineError::InvalidProbabilities("no channels".into()));
        }
        if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(EngineError::InvalidProbabilities(format!(
                "{p:?} has a negative or non-finite entry"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > INPUT_TOLERANCE {
            return Err(EngineError::InvalidProbabilities(format!(
                "{p:?} sums to {sum}"
            )));
        }
        Ok(Self(p.into_iter().map(|v| v / sum).collect()))
    }

    /// Uniform point `1/K`.
    pub fn barycenter(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub(crate) fn from_raw(p: Vec<f64>) -> Self {
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn is_absorbed(&self, k: usize) -> bool {
        self.0[k] == 0.0
    }

    pub fn survivors(&self) -> usize {
        self.0.iter().filter(|&&v| v > 0.0).count()
    }

    /// The channel holding all probability, once only one survives.
    pub fn winner(&self) -> Option<usize> {
        if self.survivors() == 1 {
            self.0.iter().position(|&v| v > 0.0)
        } else {
            None
        }
    }
}
