// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::ExactError;

/// Largest basis accepted by default (configurations times LE words).
pub const DEFAULT_BASIS_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistics {
    /// Initial data is symmetrized over atom permutations.
    Bosonic,
    /// Atoms are labelled; no symmetrization.
    Distinguishable,
}

/// Atoms hopping on an open chain of `sites` sites, with static A-particle
/// tracks per channel.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LatticeModel {
    pub sites: usize,
    pub atoms: usize,
    pub channels: usize,
    pub hop_amplitude: f64,
    pub u_strength: f64,
    pub v_strength: f64,
    /// Zero-based sites touched by each channel's track.
    pub a_tracks: Vec<Vec<usize>>,
    pub statistics: Statistics,
    /// Forbid two atoms on one site.
    pub hard_core: bool,
    /// Atoms interact when `|x_a - x_b| <= contact_range`.
    pub contact_range: usize,
    pub basis_cap: usize,
}

impl LatticeModel {
    /// Single-channel model with one track and on-site contact.
    pub fn single_channel(
        sites: usize,
        atoms: usize,
        hop: f64,
        u: f64,
        v: f64,
        track: Vec<usize>,
    ) -> Self {
        Self {
            sites,
            atoms,
            channels: 1,
            hop_amplitude: hop,
            u_strength: u,
            v_strength: v,
            a_tracks: vec![track],
            statistics: Statistics::Bosonic,
            hard_core: false,
            contact_range: 0,
            basis_cap: DEFAULT_BASIS_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        let bad = |m: String| Err(ExactError::InvalidModel(m));
        if self.channels == 0 {
            return bad("K = 0: at least one channel is required".into());
        }
        if self.atoms == 0 {
            return bad("N = 0: at least one atom is required".into());
        }
        if self.sites == 0 {
            return bad("M = 0: at least one site is required".into());
        }
        if self.hard_core && self.sites < self.atoms {
            return bad(format!(
                "hard-core occupancy needs M >= N (M = {}, N = {})",
                self.sites, self.atoms
            ));
        }
        if self.a_tracks.len() != self.channels {
            return bad(format!(
                "{} tracks given for {} channels",
                self.a_tracks.len(),
                self.channels
            ));
        }
        for (k, track) in self.a_tracks.iter().enumerate() {
            if let Some(&s) = track.iter().find(|&&s| s >= self.sites) {
                return bad(format!(
                    "track {} contains site {} outside 0..{}",
                    k + 1,
                    s,
                    self.sites
                ));
            }
        }
        for (name, v) in [
            ("hop", self.hop_amplitude),
            ("u", self.u_strength),
            ("v", self.v_strength),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} strength is not finite"));
            }
        }
        if self.channels > u8::MAX as usize - 1 || self.sites > u8::MAX as usize {
            return bad("at most 254 channels and 255 sites are supported".into());
        }
        Ok(())
    }
}

/// Product basis of atom configurations and LE words.
///
/// State index is `config * n_words + word`; word `w` stores the letter of
/// atom `a` as digit `a` of `w` in base `K + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub sites: usize,
    pub atoms: usize,
    pub channels: usize,
    pub configs: Vec<Vec<u8>>,
    lookup: Vec<u32>,
    pub n_words: usize,
}

const NONE: u32 = u32::MAX;

impl Basis {
    pub fn new(model: &LatticeModel) -> Result<Self, ExactError> {
        model.validate()?;
        let too_large = || ExactError::BasisTooLarge {
            required: usize::MAX,
            cap: model.basis_cap,
        };
        let radix = model.channels + 1;
        let n_words = checked_pow(radix, model.atoms).ok_or_else(too_large)?;
        let n_tuples = checked_pow(model.sites, model.atoms).ok_or_else(too_large)?;
        let mut configs = Vec::new();
        let mut lookup = vec![NONE; n_tuples];
        let mut pos = vec![0u8; model.atoms];
        for (t, slot) in lookup.iter_mut().enumerate() {
            let mut rem = t;
            for p in pos.iter_mut() {
                *p = (rem % model.sites) as u8;
                rem /= model.sites;
            }
            if model.hard_core && has_double(&pos) {
                continue;
            }
            *slot = configs.len() as u32;
            configs.push(pos.clone());
        }
        let required = configs.len().checked_mul(n_words).ok_or_else(too_large)?;
        if required > model.basis_cap {
            return Err(ExactError::BasisTooLarge {
                required,
                cap: model.basis_cap,
            });
        }
        Ok(Self {
            sites: model.sites,
            atoms: model.atoms,
            channels: model.channels,
            configs,
            lookup,
            n_words,
        })
    }

    pub fn dim(&self) -> usize {
        self.configs.len() * self.n_words
    }

    pub fn n_configs(&self) -> usize {
        self.configs.len()
    }

    /// Configuration index of a position tuple, if allowed.
    pub fn config_index(&self, pos: &[u8]) -> Option<usize> {
        let mut t = 0usize;
        for &p in pos.iter().rev() {
            t = t * self.sites + p as usize;
        }
        match self.lookup[t] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn letter(&self, word: usize, atom: usize) -> usize {
        let radix = self.channels + 1;
        (word / radix.pow(atom as u32)) % radix
    }

    pub fn with_letter(&self, word: usize, atom: usize, letter: usize) -> usize {
        let radix = self.channels + 1;
        let place = radix.pow(atom as u32);
        word - self.letter(word, atom) * place + letter * place
    }

    pub fn letters(&self, word: usize) -> Vec<usize> {
        (0..self.atoms).map(|a| self.letter(word, a)).collect()
    }

    pub fn word_of(&self, letters: &[usize]) -> usize {
        let radix = self.channels + 1;
        letters.iter().rev().fold(0, |w, &l| w * radix + l)
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

fn has_double(pos: &[u8]) -> bool {
    pos.iter()
        .enumerate()
        .any(|(i, p)| pos[i + 1..].contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_channels_rejected() {
        let mut m = LatticeModel::single_channel(3, 2, 1.0, 1.0, 1.0, vec![0]);
        m.channels = 0;
        m.a_tracks.clear();
        assert!(matches!(Basis::new(&m), Err(ExactError::InvalidModel(_))));
    }

    #[test]
    fn cap_reports_required_size() {
        let mut m = LatticeModel::single_channel(4, 3, 1.0, 1.0, 1.0, vec![0]);
        m.basis_cap = 100;
        assert_eq!(
            Basis::new(&m).unwrap_err(),
            ExactError::BasisTooLarge {
                required: 64 * 8,
                cap: 100
            }
        );
    }

    #[test]
    fn hard_core_counts() {
        let mut m = LatticeModel::single_channel(4, 2, 1.0, 0.0, 0.0, vec![0]);
        m.hard_core = true;
        let b = Basis::new(&m).unwrap();
        assert_eq!(b.n_configs(), 12);
        assert_eq!(b.config_index(&[1, 1]), None);
        assert_eq!(b.configs[b.config_index(&[2, 3]).unwrap()], vec![2, 3]);
    }

    #[test]
    fn word_digits_round_trip() {
        let mut m = LatticeModel::single_channel(2, 3, 1.0, 1.0, 1.0, vec![0]);
        m.channels = 2;
        m.a_tracks = vec![vec![0], vec![1]];
        let b = Basis::new(&m).unwrap();
        for w in 0..b.n_words {
            assert_eq!(b.word_of(&b.letters(w)), w);
        }
        let w = b.word_of(&[2, 0, 1]);
        assert_eq!(b.with_letter(w, 1, 2), b.word_of(&[2, 2, 1]));
    }
}
