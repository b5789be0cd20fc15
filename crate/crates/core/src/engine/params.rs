// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::EngineError;

/// Default ceiling on `W`: the Wigner random-matrix value `4 / (3 pi)`.
pub const W_CEILING: f64 = 4.0 / (3.0 * std::f64::consts::PI);

/// Slip amplitude and rate parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SlipParams {
    /// Incoherence strength.
    pub w: f64,
    /// Atom number density.
    pub n_a: f64,
    pub lambda: f64,
    pub tau: f64,
    /// Atoms per coherent component, `n_a lambda^3`.
    pub n_c: f64,
    /// Coherence cell volume `lambda^3`.
    pub cell_volume: f64,
    /// Collisions per coherence cell per unit time that can slip.
    pub collision_rate_per_cell: f64,
    pub w_ceiling: f64,
}

/// How the per-cell collision rate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionRate {
    /// `n_a lambda^3 / (2 tau)`.
    Nominal,
    /// Rate at which the sampled variance of `p_1` equals the closed-form
    /// second moment at the barycentre, for uniform fields at level `f_ref`.
    Matched { f_ref: f64 },
    /// Explicit value.
    Fixed(f64),
}

impl SlipParams {
    /// Parameters with the nominal collision rate and default `W` ceiling.
    pub fn new(w: f64, n_a: f64, lambda: f64, tau: f64) -> Result<Self, EngineError> {
        for (name, v) in [("n_a", n_a), ("lambda", lambda), ("tau", tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EngineError::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let cell_volume = lambda.powi(3);
        let n_c = n_a * cell_volume;
        let p = Self {
            w,
            n_a,
            lambda,
            tau,
            n_c,
            cell_volume,
            collision_rate_per_cell: n_c / (2.0 * tau),
            w_ceiling: W_CEILING,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.w > 0.0) || self.w > self.w_ceiling {
            return Err(EngineError::InvalidParams(format!(
                "W must satisfy 0 < W <= {} (ceiling), got {}",
                self.w_ceiling, self.w
            )));
        }
        if !(self.n_c >= 1.0) {
            return Err(EngineError::InvalidParams(format!(
                "N_c = n_a lambda^3 must be >= 1, got {}",
                self.n_c
            )));
        }
        let expected = self.n_a * self.lambda.powi(3);
        if (self.n_c - expected).abs() > 1e-12 * expected {
            return Err(EngineError::InvalidParams(format!(
                "N_c = n_a lambda^3 violated: {} != {}",
                self.n_c, expected
            )));
        }
        if !(self.collision_rate_per_cell >= 0.0 && self.collision_rate_per_cell.is_finite()) {
            return Err(EngineError::InvalidParams(
                "collision rate must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn with_ceiling(mut self, ceiling: f64) -> Result<Self, EngineError> {
        self.w_ceiling = ceiling;
        self.validate()?;
        Ok(self)
    }

    /// Sets the collision rate for a `channels`-channel run.
    pub fn with_rate(mut self, rate: CollisionRate, channels: usize) -> Result<Self, EngineError> {
        self.collision_rate_per_cell = match rate {
            CollisionRate::Nominal => self.n_c / (2.0 * self.tau),
            CollisionRate::Fixed(r) => r,
            CollisionRate::Matched { f_ref } => self.matched_rate(channels, f_ref)?,
        };
        self.validate()?;
        Ok(self)
    }

    /// At `p_k = 1/K` with every `f_k = f` and `f0 = 1 - f`, Poisson slips
    /// at rate `R` per cell volume give
    /// `var dp_1 = R dt (W f f0 / 2)(W f f0 / (2 N_c))^2 2 p^2 [(1 - p)^2 + (K - 1) p^2]`
    /// per cell, while the closed form is
    /// `W p (1 - p) (dt / tau) n_a V f f0 / N_c^2`. Solving for `R` gives
    /// the rate below.
    fn matched_rate(&self, channels: usize, f_ref: f64) -> Result<f64, EngineError> {
        if channels < 2 {
            return Err(EngineError::InvalidParams(
                "matched rate needs K >= 2".into(),
            ));
        }
        if !(f_ref > 0.0 && f_ref < 1.0) {
            return Err(EngineError::InvalidParams(format!(
                "reference field level must lie in (0, 1), got {f_ref}"
            )));
        }
        let k = channels as f64;
        let p = 1.0 / k;
        let f0 = 1.0 - f_ref;
        let shape = p * p * ((1.0 - p).powi(2) + (k - 1.0) * p * p);
        let w = self.w;
        Ok(4.0 * p * (1.0 - p) * self.n_a * self.cell_volume
            / (self.tau * w * w * f_ref * f_ref * f0 * f0 * shape))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = SlipParams::new(0.4, 100.0, 1.0, 1.0).unwrap();
        assert_eq!(p.n_c, 100.0);
        assert_eq!(p.cell_volume, 1.0);
        assert_eq!(p.collision_rate_per_cell, 50.0);
    }

    #[test]
    fn w_bounds() {
        assert!(SlipParams::new(-0.1, 1.0, 1.0, 1.0).is_err());
        assert!(SlipParams::new(0.5, 1.0, 1.0, 1.0).is_err());
        assert!(SlipParams::new(0.5, 1.0, 1.0, 1.0).is_err());
        let p = SlipParams::new(0.4, 1.0, 1.0, 1.0).unwrap();
        assert!(p.with_ceiling(1.0).is_ok());
    }

    #[test]
    fn too_small_component_rejected() {
        assert!(SlipParams::new(0.4, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn matched_rate_two_channels() {
        // 8 n_a V / (tau W^2 f^2 f0^2) at the midpoint
        let p = SlipParams::new(0.4, 1.0, 1.0, 1.0)
            .unwrap()
            .with_rate(CollisionRate::Matched { f_ref: 0.4 }, 2)
            .unwrap();
        let expected = 8.0 / (0.16 * 0.16 * 0.36);
        assert!((p.collision_rate_per_cell - expected).abs() < 1e-9 * expected);
    }
}
