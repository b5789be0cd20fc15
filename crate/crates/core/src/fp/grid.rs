// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::FpError;

/// Cells on the simplex in the coordinates `(p_1, .., p_{K-1})`.
///
/// K = 2 is the interval `p_1 in [0, 1]` cut into `resolution` cells. K = 3
/// uses the square cells of side `1/resolution` that lie wholly inside the
/// triangle `p_1 + p_2 <= 1`, so the hypotenuse is a staircase.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimplexGrid {
    pub channels: usize,
    pub resolution: usize,
    /// Integer position of each cell, one entry per free coordinate.
    pub cells: Vec<Vec<usize>>,
    lookup: Vec<Option<usize>>,
}

impl SimplexGrid {
    pub fn new(channels: usize, resolution: usize) -> Result<Self, FpError> {
        let n = resolution;
        let mut cells = Vec::new();
        let lookup = match channels {
            2 => {
                if n < 2 {
                    return Err(FpError::InvalidGrid("K = 2 needs at least 2 cells".into()));
                }
                cells.extend((0..n).map(|i| vec![i]));
                (0..n).map(Some).collect()
            }
            3 => {
                if n < 3 {
                    return Err(FpError::InvalidGrid(
                        "K = 3 needs at least 3 cells per edge".into(),
                    ));
                }
                let mut lookup = vec![None; n * n];
                for j in 0..n {
                    for i in 0..n {
                        if i + j + 2 <= n {
                            lookup[j * n + i] = Some(cells.len());
                            cells.push(vec![i, j]);
                        }
                    }
                }
                lookup
            }
            k => return Err(FpError::Unsupported(k)),
        };
        Ok(Self {
            channels,
            resolution,
            cells,
            lookup,
        })
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    pub fn dims(&self) -> usize {
        self.channels - 1
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Measure of one cell.
    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dims() as i32)
    }

    /// Cell holding integer position `pos`, if inside.
    pub fn cell_at(&self, pos: &[isize]) -> Option<usize> {
        let n = self.resolution as isize;
        if pos.iter().any(|&c| c < 0 || c >= n) {
            return None;
        }
        let flat = match pos {
            [i] => *i,
            [i, j] => j * n + i,
            _ => return None,
        };
        self.lookup[flat as usize]
    }

    /// Free coordinates of a point on the continuous grid.
    pub fn coordinates(&self, pos: &[f64]) -> Vec<f64> {
        pos.iter().map(|c| c * self.spacing()).collect()
    }

    /// Full simplex point for free coordinates `x`.
    pub fn simplex_point(x: &[f64]) -> Vec<f64> {
        let mut p = x.to_vec();
        p.push(1.0 - x.iter().sum::<f64>());
        p
    }

    /// Simplex point at the centre of `cell`.
    pub fn center(&self, cell: usize) -> Vec<f64> {
        let x: Vec<f64> = self.cells[cell]
            .iter()
            .map(|&c| (c as f64 + 0.5) * self.spacing())
            .collect();
        Self::simplex_point(&x)
    }

    /// Cell containing `p`, by its free coordinates.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        let pos: Vec<isize> = p[..self.dims()]
            .iter()
            .map(|&x| {
                ((x * self.resolution as f64).floor() as isize).min(self.resolution as isize - 1)
            })
            .collect();
        self.cell_at(&pos)
    }
}

/// Probability density per cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FPDensity {
    pub phi: Vec<f64>,
    pub time: f64,
}

impl FPDensity {
    /// Normalized Gaussian of width `sigma` in each free coordinate around
    /// `p0`, sampled at cell centres.
    pub fn gaussian(grid: &SimplexGrid, p0: &[f64], sigma: f64) -> Result<Self, FpError> {
        if p0.len() != grid.channels || !(sigma > 0.0) {
            return Err(FpError::InvalidDensity(format!(
                "need a {}-channel centre and positive width",
                grid.channels
            )));
        }
        let mut phi: Vec<f64> = (0..grid.len())
            .map(|c| {
                let x = grid.center(c);
                let r2: f64 = (0..grid.dims()).map(|a| (x[a] - p0[a]).powi(2)).sum();
                (-0.5 * r2 / (sigma * sigma)).exp()
            })
            .collect();
        let mass: f64 = phi.iter().sum::<f64>() * grid.cell_measure();
        if !(mass > 0.0) {
            return Err(FpError::InvalidDensity(
                "initial density has no mass on the grid".into(),
            ));
        }
        phi.iter_mut().for_each(|v| *v /= mass);
        Ok(Self { phi, time: 0.0 })
    }

    pub fn mass(&self, grid: &SimplexGrid) -> f64 {
        self.phi.iter().sum::<f64>() * grid.cell_measure()
    }

    /// `int p_a Phi` over the grid.
    pub fn first_moment(&self, grid: &SimplexGrid, a: usize) -> f64 {
        self.phi
            .iter()
            .enumerate()
            .map(|(c, v)| v * grid.center(c)[a])
            .sum::<f64>()
            * grid.cell_measure()
    }

    /// Variance of `p_a` under the normalized density.
    pub fn variance(&self, grid: &SimplexGrid, a: usize) -> f64 {
        let m = self.mass(grid);
        let mean = self.first_moment(grid, a) / m;
        self.phi
            .iter()
            .enumerate()
            .map(|(c, v)| v * (grid.center(c)[a] - mean).powi(2))
            .sum::<f64>()
            * grid.cell_measure()
            / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts() {
        assert_eq!(SimplexGrid::new(2, 50).unwrap().len(), 50);
        // full squares inside the triangle: (n - 1) n / 2
        assert_eq!(SimplexGrid::new(3, 10).unwrap().len(), 45);
        assert!(SimplexGrid::new(4, 10).is_err());
    }

    #[test]
    fn centres_sum_to_one() {
        let g = SimplexGrid::new(3, 12).unwrap();
        for c in 0..g.len() {
            let p = g.center(c);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(p.iter().all(|&x| x > 0.0));
            assert_eq!(g.locate(&p), Some(c));
        }
    }

    #[test]
    fn gaussian_is_normalized() {
        let g = SimplexGrid::new(2, 200).unwrap();
        let d = FPDensity::gaussian(&g, &[0.3, 0.7], 0.02).unwrap();
        assert!((d.mass(&g) - 1.0).abs() < 1e-12);
        assert!((d.first_moment(&g, 0) - 0.3).abs() < 1e-6);
    }
}
