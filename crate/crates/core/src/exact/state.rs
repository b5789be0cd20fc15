// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use num_complex::Complex64;

use super::hamiltonian::LeHamiltonian;
use super::model::{Basis, Statistics};
use super::ExactError;

/// Norm drift of the reconstructed state that aborts an evolution.
const DRIFT_LIMIT: f64 = 1e-6;
/// RK4 stability limit on the imaginary axis is 2*sqrt(2); stay inside it.
const RK4_LIMIT: f64 = 2.5;

/// Branch vector `psi'`: one amplitude per (configuration, LE word).
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub basis: Arc<Basis>,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl BranchState {
    /// Places a normalized standard wavefunction in the all-zeros word.
    pub fn from_standard(basis: Arc<Basis>, psi: &[Complex64]) -> Result<Self, ExactError> {
        if psi.len() != basis.n_configs() {
            return Err(ExactError::BadState(format!(
                "{} amplitudes for {} configurations",
                psi.len(),
                basis.n_configs()
            )));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(ExactError::BadState("zero wavefunction".into()));
        }
        let nw = basis.n_words;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for (c, z) in psi.iter().enumerate() {
            amplitudes[c * nw] = z / norm;
        }
        Ok(Self {
            basis,
            amplitudes,
            time: 0.0,
        })
    }

    /// Atoms localized at `positions`, symmetrized over permutations for
    /// bosons.
    pub fn localized(h: &LeHamiltonian, positions: &[usize]) -> Result<Self, ExactError> {
        let basis = &h.basis;
        if positions.len() != basis.atoms || positions.iter().any(|&x| x >= basis.sites) {
            return Err(ExactError::BadState(format!(
                "need {} positions in 0..{}",
                basis.atoms, basis.sites
            )));
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); basis.n_configs()];
        let base: Vec<u8> = positions.iter().map(|&x| x as u8).collect();
        let perms = match h.model.statistics {
            Statistics::Bosonic => permutations(basis.atoms),
            Statistics::Distinguishable => vec![(0..basis.atoms).collect()],
        };
        for perm in perms {
            let pos: Vec<u8> = perm.iter().map(|&i| base[i]).collect();
            let c = basis.config_index(&pos).ok_or_else(|| {
                ExactError::BadState(format!("configuration {positions:?} is excluded"))
            })?;
            psi[c] += 1.0;
        }
        Self::from_standard(h.basis.clone(), &psi)
    }

    /// Amplitudes of branch `word` over configurations.
    pub fn branch(&self, word: usize) -> Vec<Complex64> {
        let nw = self.basis.n_words;
        (0..self.basis.n_configs())
            .map(|c| self.amplitudes[c * nw + word])
            .collect()
    }

    /// `sum_w |psi_w|^2`, which is not conserved.
    pub fn branch_weight(&self, word: usize) -> f64 {
        self.branch(word).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest deviation from invariance under simultaneous permutation of
    /// atom positions and word letters.
    pub fn symmetry_defect(&self) -> f64 {
        let b = &self.basis;
        let nw = b.n_words;
        let mut worst: f64 = 0.0;
        let perms = permutations(b.atoms);
        for (c, pos) in b.configs.iter().enumerate() {
            for w in 0..nw {
                let z = self.amplitudes[c * nw + w];
                let letters = b.letters(w);
                for perm in &perms {
                    let p2: Vec<u8> = perm.iter().map(|&i| pos[i]).collect();
                    let l2: Vec<usize> = perm.iter().map(|&i| letters[i]).collect();
                    if let Some(c2) = b.config_index(&p2) {
                        let z2 = self.amplitudes[c2 * nw + b.word_of(&l2)];
                        worst = worst.max((z - z2).norm());
                    }
                }
            }
        }
        worst
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for slot in 0..=k {
                let mut q = p.clone();
                q.insert(slot, k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// `sum_s psi_s`: the ordinary wavefunction on configurations.
pub fn reconstruct_standard(state: &BranchState) -> Vec<Complex64> {
    let nw = state.basis.n_words;
    state
        .amplitudes
        .chunks(nw)
        .map(|block| block.iter().sum())
        .collect()
}

fn standard_norm(state: &BranchState) -> f64 {
    reconstruct_standard(state)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Integrates `i d psi'/dt = H' psi'` with classical RK4.
pub fn evolve(
    state: &BranchState,
    h: &LeHamiltonian,
    dt: f64,
    steps: usize,
) -> Result<BranchState, ExactError> {
    evolve_observed(state, h, dt, steps, |_, _| {})
}

/// As [`evolve`], calling `observe(step, state)` after every step.
pub fn evolve_observed(
    state: &BranchState,
    h: &LeHamiltonian,
    dt: f64,
    steps: usize,
    mut observe: impl FnMut(usize, &BranchState),
) -> Result<BranchState, ExactError> {
    let product = dt.abs() * h.row_sum_norm;
    if !dt.is_finite() || product > RK4_LIMIT {
        return Err(ExactError::StepTooLarge {
            dt,
            product,
            limit: RK4_LIMIT,
        });
    }
    let n = state.amplitudes.len();
    let mut out = state.clone();
    let norm0 = standard_norm(state);
    let minus_i = Complex64::new(0.0, -1.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    );
    let rhs = |x: &[Complex64], y: &mut [Complex64]| {
        h.matrix.apply(x, y);
        y.iter_mut().for_each(|v| *v *= minus_i);
    };
    for step in 1..=steps {
        let psi = &mut out.amplitudes;
        rhs(psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        rhs(&tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        out.time = state.time + step as f64 * dt;
        let drift = (standard_norm(&out) - norm0).abs();
        if !(drift <= DRIFT_LIMIT) {
            return Err(ExactError::Divergence { step, drift });
        }
        observe(step, &out);
    }
    Ok(out)
}

/// Expected number of atoms carrying letter `r`, averaged over branches with
/// weights `|psi_w|^2`. Summed over `r` this is `N`.
pub fn le_occupation(state: &BranchState, r: usize) -> f64 {
    let b = &state.basis;
    let nw = b.n_words;
    let mut weighted = 0.0;
    let mut total = 0.0;
    for w in 0..nw {
        let weight: f64 = (0..b.n_configs())
            .map(|c| state.amplitudes[c * nw + w].norm_sqr())
            .sum();
        if weight == 0.0 {
            continue;
        }
        let count = b.letters(w).iter().filter(|&&l| l == r).count();
        weighted += weight * count as f64;
        total += weight;
    }
    if total == 0.0 {
        0.0
    } else {
        weighted / total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalProbabilities {
    /// `f_r` for `r = 0..=K`.
    pub f: Vec<f64>,
    /// `|sum_r f_r - 1|`, the size of the neglected cross terms.
    pub cross_term: f64,
}

/// `f_r` in `cell`: branch-diagonal count of letter-`r` atoms over the
/// expected atom count of the ordinary state.
pub fn local_probabilities(
    state: &BranchState,
    cell: &[usize],
) -> Result<LocalProbabilities, ExactError> {
    if cell.is_empty() {
        return Err(ExactError::EmptyCell(0.0));
    }
    let b = &state.basis;
    let nw = b.n_words;
    let inside = |x: u8| cell.contains(&(x as usize));
    let psi = reconstruct_standard(state);
    let mut denom = 0.0;
    let mut num = vec![0.0; b.channels + 1];
    for (c, pos) in b.configs.iter().enumerate() {
        let occupied = pos.iter().filter(|&&x| inside(x)).count();
        if occupied == 0 {
            continue;
        }
        denom += psi[c].norm_sqr() * occupied as f64;
        for w in 0..nw {
            let weight = state.amplitudes[c * nw + w].norm_sqr();
            if weight == 0.0 {
                continue;
            }
            for (a, &x) in pos.iter().enumerate() {
                if inside(x) {
                    num[b.letter(w, a)] += weight;
                }
            }
        }
    }
    if !(denom > 1e-14) {
        return Err(ExactError::EmptyCell(denom));
    }
    let f: Vec<f64> = num.iter().map(|n| n / denom).collect();
    let cross_term = (f.iter().sum::<f64>() - 1.0).abs();
    Ok(LocalProbabilities { f, cross_term })
}
