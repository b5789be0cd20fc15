// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use num_complex::Complex64;

use super::contagion::{ContagionMatrices, LabelOp};
use super::model::{Basis, LatticeModel};
use super::ExactError;

/// Real sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut rows = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if rows.last() == Some(&r) && col_idx.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        let keep: Vec<bool> = values.iter().map(|&v| v != 0.0).collect();
        let mut k = 0;
        rows.retain(|_| {
            k += 1;
            keep[k - 1]
        });
        let mut k = 0;
        col_idx.retain(|_| {
            k += 1;
            keep[k - 1]
        });
        values.retain(|&v| v != 0.0);
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let t = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (j, i, v))
            .collect();
        Self::from_triplets(self.n, t)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.col_idx[k]] * self.values[k];
            }
            *yi = acc;
        }
    }

    fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| x[self.col_idx[k]] * self.values[k])
                .sum();
        }
    }

    /// Maximum absolute row sum, the induced infinity norm.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest singular value by power iteration on `A^T A`.
    pub fn spectral_norm(&self) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        let at = self.transpose();
        let mut v: Vec<f64> = (0..self.n).map(|i| 1.0 + (i % 7) as f64 / 7.0).collect();
        let mut av = vec![0.0; self.n];
        let mut sigma = 0.0;
        for _ in 0..500 {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            self.apply_real(&v, &mut av);
            let next = av.iter().map(|x| x * x).sum::<f64>().sqrt();
            at.apply_real(&av, &mut v);
            if (next - sigma).abs() <= 1e-13 * next {
                return next;
            }
            sigma = next;
        }
        sigma
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }
}

/// The contagion Hamiltonian `H'` on a [`Basis`].
#[derive(Debug, Clone)]
pub struct LeHamiltonian {
    pub model: LatticeModel,
    pub basis: Arc<Basis>,
    pub matrix: SparseMatrix,
    /// Operator norm of `H' - H'^T` (entries are real).
    pub hermitian_defect: f64,
    /// `max_i sum_j |H'_ij|`.
    pub row_sum_norm: f64,
}

impl LeHamiltonian {
    /// Fixed RK4 step `0.05 / |H'|_inf`.
    pub fn default_dt(&self) -> f64 {
        if self.row_sum_norm > 0.0 {
            0.05 / self.row_sum_norm
        } else {
            0.05
        }
    }

    /// Restriction of `H'` to the all-zeros word, as a matrix on configurations.
    pub fn free_sector(&self) -> SparseMatrix {
        let nw = self.basis.n_words;
        let t = self
            .matrix
            .triplets()
            .into_iter()
            .filter(|&(i, j, _)| i % nw == 0 && j % nw == 0)
            .map(|(i, j, v)| (i / nw, j / nw, v))
            .collect();
        SparseMatrix::from_triplets(self.basis.n_configs(), t)
    }
}

fn moves(basis: &Basis, model: &LatticeModel, pos: &[u8]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut next = pos.to_vec();
    for a in 0..pos.len() {
        let x = pos[a] as usize;
        for y in [x.wrapping_sub(1), x + 1] {
            if y >= model.sites {
                continue;
            }
            next[a] = y as u8;
            if let Some(c) = basis.config_index(&next) {
                out.push((c, -model.hop_amplitude));
            }
        }
        next[a] = pos[a];
    }
    out
}

fn in_contact(model: &LatticeModel, x: u8, y: u8) -> bool {
    (x as isize - y as isize).unsigned_abs() <= model.contact_range
}

fn tracks_at(model: &LatticeModel, site: usize) -> impl Iterator<Item = usize> + '_ {
    model
        .a_tracks
        .iter()
        .enumerate()
        .filter(move |(_, t)| t.contains(&site))
        .map(|(k, _)| k + 1)
}

/// Builds `H'`: hopping diagonal in words, `U (P_1 + S_k)` on atoms at
/// channel-`k` track sites, and the pair contagion operator for atoms in
/// contact.
pub fn build_le_hamiltonian(model: &LatticeModel) -> Result<LeHamiltonian, ExactError> {
    let basis = Basis::new(model)?;
    let nw = basis.n_words;
    let track_ops: Vec<LabelOp> = (1..=model.channels)
        .map(|k| ContagionMatrices::track_operator(model.channels, k))
        .collect();
    let pair = ContagionMatrices::pair_operator(model.channels);
    let mut entries = Vec::new();
    for (c, pos) in basis.configs.iter().enumerate() {
        let hops = moves(&basis, model, pos);
        for w in 0..nw {
            let col = c * nw + w;
            for &(c2, amp) in &hops {
                entries.push((c2 * nw + w, col, amp));
            }
            for (a, &x) in pos.iter().enumerate() {
                let letter = basis.letter(w, a);
                for k in tracks_at(model, x as usize) {
                    for (l2, coeff) in track_ops[k - 1].apply(letter) {
                        let w2 = basis.with_letter(w, a, l2);
                        entries.push((c * nw + w2, col, model.u_strength * coeff as f64));
                    }
                }
            }
            for a in 0..pos.len() {
                for b in a + 1..pos.len() {
                    if !in_contact(model, pos[a], pos[b]) {
                        continue;
                    }
                    let (la, lb) = (basis.letter(w, a), basis.letter(w, b));
                    for ((la2, lb2), coeff) in pair.apply(la, lb) {
                        let w2 = basis.with_letter(basis.with_letter(w, a, la2), b, lb2);
                        entries.push((c * nw + w2, col, model.v_strength * coeff as f64));
                    }
                }
            }
        }
    }
    let matrix = SparseMatrix::from_triplets(basis.dim(), entries);
    let transpose = matrix.transpose();
    let mut diff = matrix.triplets();
    diff.extend(transpose.triplets().into_iter().map(|(i, j, v)| (i, j, -v)));
    let hermitian_defect = SparseMatrix::from_triplets(basis.dim(), diff).spectral_norm();
    let row_sum_norm = matrix.row_sum_norm();
    Ok(LeHamiltonian {
        model: model.clone(),
        basis: Arc::new(basis),
        matrix,
        hermitian_defect,
        row_sum_norm,
    })
}

/// The ordinary Hamiltonian of the atoms on configurations: hopping, `U`
/// per track covering an atom's site, and `V` per contact pair.
pub fn standard_hamiltonian(model: &LatticeModel) -> Result<(Basis, SparseMatrix), ExactError> {
    let basis = Basis::new(model)?;
    let mut entries = Vec::new();
    for (c, pos) in basis.configs.iter().enumerate() {
        for (c2, amp) in moves(&basis, model, pos) {
            entries.push((c2, c, amp));
        }
        let mut diag = 0.0;
        for &x in pos {
            diag += model.u_strength * tracks_at(model, x as usize).count() as f64;
        }
        for a in 0..pos.len() {
            for b in a + 1..pos.len() {
                if in_contact(model, pos[a], pos[b]) {
                    diag += model.v_strength;
                }
            }
        }
        entries.push((c, c, diag));
    }
    let n = basis.n_configs();
    Ok((basis, SparseMatrix::from_triplets(n, entries)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Statistics;

    fn two_channel() -> LatticeModel {
        LatticeModel {
            sites: 3,
            atoms: 2,
            channels: 2,
            hop_amplitude: 1.0,
            u_strength: 0.7,
            v_strength: 1.3,
            a_tracks: vec![vec![0], vec![2]],
            statistics: Statistics::Bosonic,
            hard_core: false,
            contact_range: 0,
            basis_cap: 1 << 20,
        }
    }

    #[test]
    fn no_contagion_means_hermitian() {
        let m = LatticeModel::single_channel(2, 1, 1.0, 0.0, 0.0, vec![0]);
        let h = build_le_hamiltonian(&m).unwrap();
        assert_eq!(h.hermitian_defect, 0.0);
        // block diagonal: no entry couples different words
        let nw = h.basis.n_words;
        assert!(h
            .matrix
            .triplets()
            .iter()
            .all(|&(i, j, _)| i % nw == j % nw));
    }

    #[test]
    fn contagion_breaks_hermiticity() {
        let m = LatticeModel::single_channel(2, 2, 1.0, 1.0, 1.0, vec![0]);
        let h = build_le_hamiltonian(&m).unwrap();
        assert!(h.hermitian_defect > 1e-6, "{}", h.hermitian_defect);
    }

    #[test]
    fn never_unentangles() {
        let h = build_le_hamiltonian(&two_channel()).unwrap();
        let b = &h.basis;
        for (i, j, _) in h.matrix.triplets() {
            let (from, to) = (b.letters(j % b.n_words), b.letters(i % b.n_words));
            for (f, t) in from.iter().zip(&to) {
                assert!(*f == 0 || f == t, "{from:?} -> {to:?}");
            }
        }
    }

    #[test]
    fn column_sums_over_words_give_standard_h() {
        let m = two_channel();
        let h = build_le_hamiltonian(&m).unwrap();
        let (_, hs) = standard_hamiltonian(&m).unwrap();
        let nw = h.basis.n_words;
        let nc = h.basis.n_configs();
        let mut summed = vec![vec![vec![0.0; nw]; nc]; nc];
        for (i, j, v) in h.matrix.triplets() {
            summed[i / nw][j / nw][j % nw] += v;
        }
        for c2 in 0..nc {
            for c in 0..nc {
                for w in 0..nw {
                    assert!((summed[c2][c][w] - hs.get(c2, c)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn free_sector_is_standard_h_without_coupling() {
        let mut m = two_channel();
        m.u_strength = 0.0;
        let h = build_le_hamiltonian(&m).unwrap();
        let (_, hs) = standard_hamiltonian(&m).unwrap();
        assert_eq!(h.free_sector().to_dense(), hs.to_dense());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = SparseMatrix::from_triplets(3, vec![(0, 0, 1.0), (1, 1, -4.0), (2, 2, 2.0)]);
        assert!((a.spectral_norm() - 4.0).abs() < 1e-10);
        assert_eq!(a.row_sum_norm(), 4.0);
    }
}
