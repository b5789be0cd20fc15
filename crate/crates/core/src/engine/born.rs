// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{ChannelProbabilities, EngineError, RunResult};

/// Fewest runs accepted for Born statistics.
pub const MIN_RUNS: usize = 100;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BornStatistics {
    pub runs: usize,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    /// 95% Wilson score intervals.
    pub intervals: Vec<(f64, f64)>,
    pub expected: Vec<f64>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = z * z;
    let center = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Winner frequencies with Wilson intervals and Pearson's chi-square
/// against `p0`. Channels with zero expected count are left out of the
/// statistic when nobody won them.
pub fn born_statistics(
    results: &[RunResult],
    p0: &ChannelProbabilities,
) -> Result<BornStatistics, EngineError> {
    if results.len() < MIN_RUNS {
        return Err(EngineError::Aggregation(format!(
            "{} results, at least {MIN_RUNS} are needed",
            results.len()
        )));
    }
    winner_statistics(results, p0)
}

/// [`born_statistics`] without the minimum run count, for small sweeps.
pub fn winner_statistics(
    results: &[RunResult],
    p0: &ChannelProbabilities,
) -> Result<BornStatistics, EngineError> {
    if results.is_empty() {
        return Err(EngineError::Aggregation("no results".into()));
    }
    let k = p0.len();
    let mut counts = vec![0u64; k];
    for r in results {
        if r.initial.len() != k
            || r.initial
                .iter()
                .zip(p0.as_slice())
                .any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(EngineError::Aggregation(format!(
                "run with seed {} stream {} started from {:?}, not {:?}",
                r.seed,
                r.stream,
                r.initial,
                p0.as_slice()
            )));
        }
        counts[r.winner] += 1;
    }
    let n = results.len() as u64;
    let expected: Vec<f64> = p0.as_slice().iter().map(|p| p * n as f64).collect();
    let mut chi_square = 0.0;
    let mut cells = 0usize;
    for (&o, &e) in counts.iter().zip(&expected) {
        if e > 0.0 {
            chi_square += (o as f64 - e).powi(2) / e;
            cells += 1;
        } else if o > 0 {
            chi_square = f64::INFINITY;
            cells += 1;
        }
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        if chi_square == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if chi_square.is_infinite() {
        0.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(chi_square)
    };
    Ok(BornStatistics {
        runs: results.len(),
        frequencies: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        intervals: counts
            .iter()
            .map(|&c| wilson_interval(c, n, 1.959963984540054))
            .collect(),
        counts,
        expected,
        chi_square,
        degrees_of_freedom: dof,
        p_value,
    })
}
