// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::SimplexGrid;
use crate::engine::SlipParams;
use crate::wave::ScalarFieldSet;

/// Field integrals `int n_a f_j f_0 dx` and the slip constants they enter with.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FieldSummary {
    pub integrals: Vec<f64>,
    pub w: f64,
    pub tau: f64,
    pub n_c: f64,
}

impl FieldSummary {
    pub fn from_fields(fields: &ScalarFieldSet, params: &SlipParams) -> Self {
        Self {
            integrals: crate::engine::slips_field_integrals(fields, params),
            w: params.w,
            tau: params.tau,
            n_c: params.n_c,
        }
    }

    /// Same integral `s` for every channel.
    pub fn uniform(channels: usize, s: f64, params: &SlipParams) -> Self {
        Self {
            integrals: vec![s; channels],
            w: params.w,
            tau: params.tau,
            n_c: params.n_c,
        }
    }

    fn scale(&self) -> f64 {
        self.w / (self.tau * self.n_c * self.n_c)
    }
}

/// Second moments per unit time at `p`: diagonal
/// `W p_j (1 - p_j) I_j / (tau N_c^2)`, off-diagonal
/// `-W p_j p_k (I_j + I_k) / (tau N_c^2)`.
pub fn diffusion_coefficients(p: &[f64], summary: &FieldSummary) -> Vec<Vec<f64>> {
    let k = p.len();
    let c = summary.scale();
    let i = &summary.integrals;
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    if a == b {
                        c * p[a] * (1.0 - p[a]) * i[a]
                    } else {
                        -c * (p[a] * p[b]) * (i[a] + i[b])
                    }
                })
                .collect()
        })
        .collect()
}

/// Coefficient block over the free coordinates, cached at cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub summary: FieldSummary,
    dims: usize,
    centers: Vec<Vec<Vec<f64>>>,
}

impl CoefficientField {
    pub fn new(grid: &SimplexGrid, summary: FieldSummary) -> Self {
        let dims = grid.dims();
        let mut field = Self {
            summary,
            dims,
            centers: Vec::new(),
        };
        field.centers = (0..grid.len())
            .map(|c| field.block(&grid.center(c)[..dims]))
            .collect();
        field
    }

    /// All coefficients zero.
    pub fn zero(grid: &SimplexGrid) -> Self {
        let summary = FieldSummary {
            integrals: vec![0.0; grid.channels],
            w: 0.0,
            tau: 1.0,
            n_c: 1.0,
        };
        Self::new(grid, summary)
    }

    /// Block `D_ab`, `a, b < K - 1`, at free coordinates `x`.
    pub fn block(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let p = SimplexGrid::simplex_point(x);
        let full = diffusion_coefficients(&p, &self.summary);
        full.into_iter()
            .take(self.dims)
            .map(|row| row.into_iter().take(self.dims).collect())
            .collect()
    }

    pub fn at_cell(&self, cell: usize) -> &[Vec<f64>] {
        &self.centers[cell]
    }

    /// Largest `sum_ab |D_ab|` over cell centres.
    pub fn max_row_weight(&self) -> f64 {
        self.centers
            .iter()
            .map(|b| b.iter().flatten().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
