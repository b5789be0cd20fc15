// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{FPDensity, FpError, SimplexGrid};

/// Ensemble of simplex points binned on a (coarse) [`SimplexGrid`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Histogram {
    pub channels: usize,
    pub resolution: usize,
    pub counts: Vec<u64>,
    /// Points with some `p_k = 0`.
    pub boundary: u64,
    /// Interior points outside every bin (the K = 3 staircase gap).
    pub unbinned: u64,
    pub total: u64,
}

impl Histogram {
    pub fn from_points<'a>(
        grid: &SimplexGrid,
        points: impl IntoIterator<Item = &'a [f64]>,
    ) -> Self {
        let mut h = Self {
            channels: grid.channels,
            resolution: grid.resolution,
            counts: vec![0; grid.len()],
            boundary: 0,
            unbinned: 0,
            total: 0,
        };
        for p in points {
            h.total += 1;
            if p.contains(&0.0) {
                h.boundary += 1;
            } else if let Some(c) = grid.locate(p) {
                h.counts[c] += 1;
            } else {
                h.unbinned += 1;
            }
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Comparison {
    /// Total variation between the normalized interior distributions.
    pub tv_distance: f64,
    pub mc_boundary_fraction: f64,
    /// Initial mass lost by the density (unit initial mass assumed).
    pub fp_boundary_fraction: f64,
}

/// Aggregates `density` onto the histogram's bins and compares them.
/// The density resolution must be a multiple of the histogram's.
pub fn compare_histogram(
    density: &FPDensity,
    grid: &SimplexGrid,
    hist: &Histogram,
) -> Result<Comparison, FpError> {
    if hist.channels != grid.channels {
        return Err(FpError::Binning(format!(
            "histogram has {} channels, density {}",
            hist.channels, grid.channels
        )));
    }
    if hist.resolution == 0 || grid.resolution % hist.resolution != 0 {
        return Err(FpError::Binning(format!(
            "density resolution {} is not a multiple of histogram resolution {}",
            grid.resolution, hist.resolution
        )));
    }
    let coarse = SimplexGrid::new(hist.channels, hist.resolution)?;
    if coarse.len() != hist.counts.len() {
        return Err(FpError::Binning(
            "histogram bin count does not match its resolution".into(),
        ));
    }
    let ratio = (grid.resolution / hist.resolution) as isize;
    let mut fp = vec![0.0; coarse.len()];
    for (c, &v) in density.phi.iter().enumerate() {
        let pos: Vec<isize> = grid.cells[c].iter().map(|&i| i as isize / ratio).collect();
        if let Some(b) = coarse.cell_at(&pos) {
            fp[b] += v * grid.cell_measure();
        }
    }
    let fp_total: f64 = fp.iter().sum();
    let mc_total: u64 = hist.counts.iter().sum();
    let tv_distance = if fp_total > 0.0 && mc_total > 0 {
        0.5 * fp
            .iter()
            .zip(&hist.counts)
            .map(|(a, &b)| (a / fp_total - b as f64 / mc_total as f64).abs())
            .sum::<f64>()
    } else {
        1.0
    };
    Ok(Comparison {
        tv_distance,
        mc_boundary_fraction: if hist.total == 0 {
            0.0
        } else {
            hist.boundary as f64 / hist.total as f64
        },
        fp_boundary_fraction: (1.0 - density.mass(grid)).max(0.0),
    })
}
