// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

/// 2x2 integer matrix. Row and column 0 belong to index 1 (entangled),
/// row and column 1 to index 0 (free).
pub type Mat2 = [[i64; 2]; 2];

/// The contagion matrices `P_0`, `P_1` and `S` for a single channel.
///
/// `S` turns a free atom into an entangled one. There is deliberately no
/// operator going the other way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContagionMatrices {
    pub p0: Mat2,
    pub p1: Mat2,
    pub s: Mat2,
}

impl Default for ContagionMatrices {
    fn default() -> Self {
        Self::new()
    }
}

impl ContagionMatrices {
    pub const fn new() -> Self {
        Self {
            p0: [[0, 0], [0, 1]],
            p1: [[1, 0], [0, 0]],
            s: [[0, 1], [0, 0]],
        }
    }

    /// `p0 + p1 = 1`, `s s = 0`, `p1 s = s`, `s p0 = s`.
    pub fn identities_hold(&self) -> bool {
        add2(self.p0, self.p1) == [[1, 0], [0, 1]]
            && mul2(self.s, self.s) == [[0, 0], [0, 0]]
            && mul2(self.p1, self.s) == self.s
            && mul2(self.s, self.p0) == self.s
    }

    /// Projector on the free letter in the `K+1` letter basis.
    pub fn free(channels: usize) -> LabelOp {
        let mut op = LabelOp::zero(channels);
        op.m[0][0] = 1;
        op
    }

    /// Projector on letter `k >= 1`.
    pub fn entangled(channels: usize, k: usize) -> LabelOp {
        let mut op = LabelOp::zero(channels);
        op.m[k][k] = 1;
        op
    }

    /// Projector on all nonzero letters.
    pub fn any_entangled(channels: usize) -> LabelOp {
        let mut op = LabelOp::zero(channels);
        for k in 1..=channels {
            op.m[k][k] = 1;
        }
        op
    }

    /// `S_k`: maps letter `0` to letter `k`.
    pub fn spread(channels: usize, k: usize) -> LabelOp {
        let mut op = LabelOp::zero(channels);
        op.m[k][0] = 1;
        op
    }

    /// Embeds a single-channel matrix into the letter basis `{0, k}`.
    pub fn embed(m: Mat2, channels: usize, k: usize) -> LabelOp {
        // local index 0 is letter k, local index 1 is letter 0
        let letter = [k, 0];
        let mut op = LabelOp::zero(channels);
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                op.m[letter[i]][letter[j]] += v;
            }
        }
        op
    }

    /// Single-atom operator for the A-atom potential at a channel-`k` track
    /// site: `P_1 + S_k`, where `P_1` covers every nonzero letter.
    pub fn track_operator(channels: usize, k: usize) -> LabelOp {
        Self::any_entangled(channels).plus(&Self::spread(channels, k))
    }

    /// Two-atom operator for the atom-atom potential, as a table over letter
    /// pairs: `P0 P0 + sum_k (Pk Pk + Sk Pk + Pk Sk)` plus the identity on
    /// pairs carrying two different nonzero letters.
    pub fn pair_operator(channels: usize) -> PairOp {
        let n = channels + 1;
        let mut op = PairOp {
            n,
            m: vec![vec![0; n * n]; n * n],
        };
        op.add_kron(&Self::free(channels), &Self::free(channels));
        for k in 1..=channels {
            let pk = Self::entangled(channels, k);
            let sk = Self::spread(channels, k);
            op.add_kron(&pk, &pk);
            op.add_kron(&sk, &pk);
            op.add_kron(&pk, &sk);
        }
        for j in 1..=channels {
            for k in 1..=channels {
                if j != k {
                    op.add_kron(&Self::entangled(channels, j), &Self::entangled(channels, k));
                }
            }
        }
        op
    }
}

fn add2(a: Mat2, b: Mat2) -> Mat2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][j] + b[i][j];
        }
    }
    c
}

fn mul2(a: Mat2, b: Mat2) -> Mat2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Integer operator on the letters `0..=K` of one atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelOp {
    pub m: Vec<Vec<i64>>,
}

impl LabelOp {
    pub fn zero(channels: usize) -> Self {
        Self {
            m: vec![vec![0; channels + 1]; channels + 1],
        }
    }

    pub fn plus(&self, other: &LabelOp) -> LabelOp {
        let mut out = self.clone();
        for (row, orow) in out.m.iter_mut().zip(&other.m) {
            for (v, o) in row.iter_mut().zip(orow) {
                *v += o;
            }
        }
        out
    }

    pub fn mul(&self, other: &LabelOp) -> LabelOp {
        let n = self.m.len();
        let mut out = LabelOp {
            m: vec![vec![0; n]; n],
        };
        for i in 0..n {
            for j in 0..n {
                out.m[i][j] = (0..n).map(|l| self.m[i][l] * other.m[l][j]).sum();
            }
        }
        out
    }

    /// Images of `letter`: pairs `(new_letter, coefficient)`.
    pub fn apply(&self, letter: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.m
            .iter()
            .enumerate()
            .filter_map(move |(i, row)| (row[letter] != 0).then_some((i, row[letter])))
    }
}

/// Integer operator on the letters of an ordered atom pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOp {
    n: usize,
    m: Vec<Vec<i64>>,
}

impl PairOp {
    fn add_kron(&mut self, a: &LabelOp, b: &LabelOp) {
        let n = self.n;
        for (ia, arow) in a.m.iter().enumerate() {
            for (ja, &av) in arow.iter().enumerate() {
                if av == 0 {
                    continue;
                }
                for (ib, brow) in b.m.iter().enumerate() {
                    for (jb, &bv) in brow.iter().enumerate() {
                        self.m[ia * n + ib][ja * n + jb] += av * bv;
                    }
                }
            }
        }
    }

    /// Images of the letter pair `(a, b)`.
    pub fn apply(&self, a: usize, b: usize) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        let col = a * self.n + b;
        let n = self.n;
        self.m
            .iter()
            .enumerate()
            .filter_map(move |(i, row)| (row[col] != 0).then_some(((i / n, i % n), row[col])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_channel_algebra() {
        let c = ContagionMatrices::new();
        assert!(c.identities_hold());
        assert_eq!(c.p0, [[0, 0], [0, 1]]);
        assert_eq!(c.p1, [[1, 0], [0, 0]]);
        assert_eq!(c.s, [[0, 1], [0, 0]]);
    }

    #[test]
    fn embedding_matches_label_operators() {
        let c = ContagionMatrices::new();
        for k in 1..=3 {
            assert_eq!(
                ContagionMatrices::embed(c.s, 3, k),
                ContagionMatrices::spread(3, k)
            );
            assert_eq!(
                ContagionMatrices::embed(c.p1, 3, k),
                ContagionMatrices::entangled(3, k)
            );
            assert_eq!(
                ContagionMatrices::embed(c.p0, 3, k),
                ContagionMatrices::free(3)
            );
        }
    }

    #[test]
    fn generalized_identities() {
        let k_max = 3;
        let zero = LabelOp::zero(k_max);
        for k in 1..=k_max {
            let s = ContagionMatrices::spread(k_max, k);
            let p = ContagionMatrices::entangled(k_max, k);
            let f = ContagionMatrices::free(k_max);
            assert_eq!(s.mul(&s), zero);
            assert_eq!(p.mul(&s), s);
            assert_eq!(s.mul(&f), s);
        }
    }

    fn images(op: &PairOp, a: usize, b: usize) -> Vec<((usize, usize), i64)> {
        op.apply(a, b).collect()
    }

    #[test]
    fn pair_rules() {
        let op = ContagionMatrices::pair_operator(2);
        assert_eq!(images(&op, 0, 0), vec![((0, 0), 1)]);
        assert_eq!(images(&op, 1, 0), vec![((1, 1), 1)]);
        assert_eq!(images(&op, 0, 2), vec![((2, 2), 1)]);
        assert_eq!(images(&op, 2, 2), vec![((2, 2), 1)]);
        assert_eq!(images(&op, 1, 2), vec![((1, 2), 1)]);
    }

    #[test]
    fn every_column_has_unit_weight() {
        // the branch sum reproduces the plain potential only if each input
        // pair is sent to exactly one output with coefficient 1
        for k in 1..=3 {
            let op = ContagionMatrices::pair_operator(k);
            for a in 0..=k {
                for b in 0..=k {
                    let total: i64 = op.apply(a, b).map(|(_, c)| c).sum();
                    assert_eq!(total, 1, "pair ({a},{b})");
                }
            }
            for ch in 1..=k {
                let t = ContagionMatrices::track_operator(k, ch);
                for l in 0..=k {
                    assert_eq!(t.apply(l).map(|(_, c)| c).sum::<i64>(), 1);
                }
            }
        }
    }
}
