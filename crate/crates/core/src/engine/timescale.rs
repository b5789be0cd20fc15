// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{EngineError, SlipParams};

/// `tau_c = tau n_a lambda^5 / (L^2 W)`, times `lambda / delta` for the
/// electron-cloud refinement when `delta` is given.
pub fn estimate_collapse_time(
    params: &SlipParams,
    l_system: f64,
    delta: Option<f64>,
) -> Result<f64, EngineError> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(EngineError::InvalidParams(format!(
                "{name} must be positive, got {v}"
            )))
        }
    };
    positive("L", l_system)?;
    positive("W", params.w)?;
    let base = params.tau * params.n_a * params.lambda.powi(5) / (l_system * l_system * params.w);
    match delta {
        Some(d) => {
            positive("delta", d)?;
            Ok(base * params.lambda / d)
        }
        None => Ok(base),
    }
}
