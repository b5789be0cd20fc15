// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{KineticParams, WaveError};

/// Cell-centred grid with no-flux walls. Cell `i` on an axis spans
/// `[i h, (i + 1) h)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid {
    pub dims: usize,
    pub cells: Vec<usize>,
    pub spacing: f64,
    /// Extent of the missing axes, so that a cell has volume
    /// `spacing^dims * transverse`.
    pub transverse: f64,
}

impl Grid {
    pub fn new(cells: Vec<usize>, spacing: f64) -> Result<Self, WaveError> {
        Self::with_transverse(cells, spacing, 1.0)
    }

    pub fn with_transverse(
        cells: Vec<usize>,
        spacing: f64,
        transverse: f64,
    ) -> Result<Self, WaveError> {
        let dims = cells.len();
        if !(1..=3).contains(&dims) {
            return Err(WaveError::InvalidGrid(format!(
                "dims must be 1, 2 or 3, got {dims}"
            )));
        }
        if cells.contains(&0) {
            return Err(WaveError::InvalidGrid(
                "every axis needs at least one cell".into(),
            ));
        }
        if !(spacing > 0.0 && spacing.is_finite()) || !(transverse > 0.0 && transverse.is_finite())
        {
            return Err(WaveError::InvalidGrid(
                "spacing and transverse extent must be positive".into(),
            ));
        }
        Ok(Self {
            dims,
            cells,
            spacing,
            transverse,
        })
    }

    /// Uniform 1D grid covering `extent`.
    pub fn line(extent: f64, spacing: f64) -> Result<Self, WaveError> {
        let n = (extent / spacing).round();
        if !(n >= 1.0) {
            return Err(WaveError::InvalidGrid(format!(
                "extent {extent} holds no cell of size {spacing}"
            )));
        }
        Self::new(vec![n as usize], spacing)
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.cells[axis] as f64 * self.spacing
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dims as i32) * self.transverse
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.cells[..axis].iter().product()
    }

    pub fn index(&self, coord: &[usize]) -> usize {
        coord
            .iter()
            .enumerate()
            .map(|(a, &c)| c * self.stride(a))
            .sum()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        self.cells
            .iter()
            .map(|&n| {
                let c = idx % n;
                idx /= n;
                c
            })
            .collect()
    }

    /// `spacing <= lambda / 4`.
    pub fn check_resolution(&self, params: &KineticParams) -> Result<(), WaveError> {
        let limit = params.lambda / 4.0;
        if self.spacing > limit * (1.0 + 1e-12) {
            return Err(WaveError::Resolution {
                spacing: self.spacing,
                limit,
            });
        }
        Ok(())
    }

    /// Largest stable explicit step `h^2 / (2 dims D)`.
    pub fn cfl_limit(&self, params: &KineticParams) -> f64 {
        self.spacing * self.spacing / (2.0 * self.dims as f64 * params.d_coeff)
    }
}

/// Where a seed field is set to 1.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Region {
    /// Cells whose centres lie in `[lo, hi]` on every axis.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Explicit flat cell indices.
    Cells(Vec<usize>),
}

/// Indicator field of `region`.
pub fn seed_field(grid: &Grid, region: &Region) -> Result<Vec<f64>, WaveError> {
    let mut f = vec![0.0; grid.len()];
    match region {
        Region::Box { lo, hi } => {
            if lo.len() != grid.dims || hi.len() != grid.dims {
                return Err(WaveError::InvalidGrid(format!(
                    "seed box has {} axes for a {}D grid",
                    lo.len(),
                    grid.dims
                )));
            }
            for (i, v) in f.iter_mut().enumerate() {
                let c = grid.coords(i);
                let inside = (0..grid.dims).all(|a| {
                    let x = grid.center(c[a]);
                    x >= lo[a] && x <= hi[a]
                });
                if inside {
                    *v = 1.0;
                }
            }
        }
        Region::Cells(cells) => {
            for &i in cells.iter().filter(|&&i| i < grid.len()) {
                f[i] = 1.0;
            }
        }
    }
    if f.iter().all(|&v| v == 0.0) {
        return Err(WaveError::EmptySeed);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_grid_seed() {
        let g = Grid::new(vec![4, 3], 0.25).unwrap();
        let f = seed_field(
            &g,
            &Region::Box {
                lo: vec![0.0, 0.0],
                hi: vec![1.0, 0.75],
            },
        )
        .unwrap();
        assert!(f.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn single_cell_seed() {
        let g = Grid::new(vec![8, 8], 0.25).unwrap();
        let f = seed_field(&g, &Region::Cells(vec![0])).unwrap();
        assert_eq!(f.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(f[0], 1.0);
    }

    #[test]
    fn seed_mass_is_volume_ratio() {
        let g = Grid::new(vec![40], 0.25).unwrap();
        let f = seed_field(
            &g,
            &Region::Box {
                lo: vec![1.0],
                hi: vec![3.0],
            },
        )
        .unwrap();
        assert_eq!(f.iter().sum::<f64>(), 2.0 / 0.25);
    }

    #[test]
    fn disjoint_seed_rejected() {
        let g = Grid::new(vec![4], 0.25).unwrap();
        let r = Region::Box {
            lo: vec![5.0],
            hi: vec![6.0],
        };
        assert_eq!(seed_field(&g, &r), Err(WaveError::EmptySeed));
        assert_eq!(
            seed_field(&g, &Region::Cells(vec![9])),
            Err(WaveError::EmptySeed)
        );
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(vec![3, 4, 5], 0.1).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index(&g.coords(i)), i);
        }
    }
}
