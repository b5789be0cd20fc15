// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{ChannelProbabilities, EngineError, SlipParams};
use crate::wave::ScalarFieldSet;

/// Poisson means above this leave the rare-event regime.
pub const MEAN_WARNING: f64 = 0.1;

/// Which decohered part of the density matrix the collision samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SlipEvent {
    pub cell: usize,
    pub channel: usize,
    pub sign: Sign,
    pub count: u32,
}

/// Probability transfer from one slip on channel `j`.
///
/// Off-channel entries are `-s W p_j p_j' f_j f_0 / (2 N_c)`; the channel-`j`
/// entry is minus their sum, which equals `s W p_j (1 - p_j) f_j f_0 / (2 N_c)`
/// on the simplex and makes the vector sum to exactly zero.
pub fn slip_delta(
    p: &ChannelProbabilities,
    j: usize,
    f_j: f64,
    f_0: f64,
    params: &SlipParams,
    sign: Sign,
) -> Vec<f64> {
    let pj = p.get(j);
    let scale = sign.value() * params.w * pj * f_j * f_0 / (2.0 * params.n_c);
    let mut delta: Vec<f64> = p.as_slice().iter().map(|&q| -scale * q).collect();
    delta[j] = 0.0;
    // Snap entries to a common power-of-two grid fine enough to cost only
    // an ulp or two; every partial sum is then exact, so the vector sums to
    // exactly zero in any order.
    let bound = delta.iter().map(|d| d.abs()).sum::<f64>();
    if bound > 0.0 && bound.is_normal() {
        let quantum = 2f64.powi(bound.log2().ceil() as i32 - 52);
        if quantum.is_normal() {
            delta
                .iter_mut()
                .for_each(|d| *d = (*d / quantum).round() * quantum);
        }
    }
    let gain: f64 = delta.iter().sum();
    delta[j] = -gain;
    delta
}

/// Events of one sampling step plus the largest per-cell Poisson mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SlipSample {
    pub events: Vec<SlipEvent>,
    pub max_mean: f64,
}

fn cell_weight(fields: &ScalarFieldSet, params: &SlipParams) -> f64 {
    params.collision_rate_per_cell * fields.grid.cell_volume() / params.cell_volume
}

/// Draws Poisson slip counts for every cell, live channel and sign.
///
/// The per-cell mean is `rate dt f_j f_0 W / 2`. Each (channel, sign) stream
/// draws its total count from the summed mean and spreads the events over
/// cells in proportion to their means, which has the same law as independent
/// per-cell draws.
pub fn sample_slips<R: Rng + ?Sized>(
    fields: &ScalarFieldSet,
    p: &ChannelProbabilities,
    params: &SlipParams,
    dt: f64,
    rng: &mut R,
) -> SlipSample {
    let per_cell = cell_weight(fields, params) * dt * params.w / 2.0;
    let n = fields.grid.len();
    let mut events = Vec::new();
    let mut max_mean: f64 = 0.0;
    let mut cumulative = vec![0.0; n];
    for (j, fj) in fields.f.iter().enumerate() {
        if p.is_absorbed(j) {
            continue;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let mu = per_cell * fj[i] * fields.f0[i];
            max_mean = max_mean.max(mu);
            acc += mu;
            cumulative[i] = acc;
        }
        if !(acc > 0.0) {
            continue;
        }
        let total = Poisson::new(acc).expect("positive finite mean");
        for sign in [Sign::Plus, Sign::Minus] {
            let count = total.sample(rng) as u64;
            let mut hits: Vec<usize> = (0..count)
                .map(|_| {
                    let u = rng.random::<f64>() * acc;
                    cumulative.partition_point(|&c| c <= u).min(n - 1)
                })
                .collect();
            hits.sort_unstable();
            let mut k = 0;
            while k < hits.len() {
                let cell = hits[k];
                let run = hits[k..].iter().take_while(|&&c| c == cell).count();
                events.push(SlipEvent {
                    cell,
                    channel: j,
                    sign,
                    count: run as u32,
                });
                k += run;
            }
        }
    }
    if max_mean > MEAN_WARNING {
        log::warn!("largest slip mean {max_mean:.3} per cell exceeds {MEAN_WARNING}; rare-event regime violated");
    }
    SlipSample { events, max_mean }
}

/// Applies the summed slip deltas, computed at the pre-step `p`. Channels
/// pushed to or below zero are absorbed and the survivors renormalized.
pub fn apply_slips(
    p: &ChannelProbabilities,
    events: &[SlipEvent],
    fields: &ScalarFieldSet,
    params: &SlipParams,
) -> Result<ChannelProbabilities, EngineError> {
    if events.is_empty() {
        return Ok(p.clone());
    }
    let mut next = p.as_slice().to_vec();
    for e in events {
        let d = slip_delta(
            p,
            e.channel,
            fields.f[e.channel][e.cell],
            fields.f0[e.cell],
            params,
            e.sign,
        );
        for (q, dq) in next.iter_mut().zip(d) {
            *q += e.count as f64 * dq;
        }
    }
    for (q, &old) in next.iter_mut().zip(p.as_slice()) {
        if old == 0.0 || *q <= 0.0 {
            *q = 0.0;
        }
    }
    let sum: f64 = next.iter().sum();
    if sum == 0.0 {
        return Err(EngineError::Degenerate);
    }
    next.iter_mut().for_each(|q| *q /= sum);
    Ok(ChannelProbabilities::from_raw(next))
}

/// One sample-and-apply step with fixed fields.
pub fn microstep<R: Rng + ?Sized>(
    p: &ChannelProbabilities,
    fields: &ScalarFieldSet,
    params: &SlipParams,
    dt: f64,
    rng: &mut R,
) -> Result<(ChannelProbabilities, SlipSample), EngineError> {
    let sample = sample_slips(fields, p, params, dt, rng);
    let next = apply_slips(p, &sample.events, fields, params)?;
    Ok((next, sample))
}

/// Closed-form second moments of one step.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Moments {
    /// `<dp_j^2>`.
    pub variance: Vec<f64>,
    /// `<dp_j dp_k>`; the diagonal repeats `variance`.
    pub covariance: Vec<Vec<f64>>,
}

/// `<dp_j^2> = W p_j (1 - p_j) (dt/tau) N_c^-2 int n_a f_j f_0` and
/// `<dp_j dp_k> = -W p_j p_k (dt/tau) N_c^-2 int n_a (f_j + f_k) f_0`,
/// with the integrals taken as grid sums.
pub fn theoretical_moments(
    p: &ChannelProbabilities,
    fields: &ScalarFieldSet,
    params: &SlipParams,
    dt: f64,
) -> Moments {
    let integrals = field_integrals(fields, params);
    let k = p.len();
    let c = params.w * dt / (params.tau * params.n_c * params.n_c);
    let mut covariance = vec![vec![0.0; k]; k];
    for j in 0..k {
        for l in 0..k {
            let (pj, pl) = (p.get(j), p.get(l));
            covariance[j][l] = if j == l {
                c * pj * (1.0 - pj) * integrals[j]
            } else {
                -c * pj * pl * (integrals[j] + integrals[l])
            };
        }
    }
    Moments {
        variance: (0..k).map(|j| covariance[j][j]).collect(),
        covariance,
    }
}

/// `int n_a f_j f_0 dx` per channel.
pub(crate) fn field_integrals(fields: &ScalarFieldSet, params: &SlipParams) -> Vec<f64> {
    let v = fields.grid.cell_volume();
    fields
        .f
        .iter()
        .map(|fj| {
            fj.iter()
                .zip(&fields.f0)
                .map(|(a, b)| params.n_a * v * a * b)
                .sum()
        })
        .collect()
}
