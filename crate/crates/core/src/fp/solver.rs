// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

use super::{CoefficientField, FPDensity, FpError, SimplexGrid};

/// Largest stable explicit step `h^2 / (2 max_c sum_ab |D_ab|)`.
pub fn stable_dt(grid: &SimplexGrid, coeffs: &CoefficientField) -> f64 {
    let w = coeffs.max_row_weight();
    if w == 0.0 {
        f64::INFINITY
    } else {
        grid.spacing().powi(2) / (2.0 * w)
    }
}

fn neighbour(grid: &SimplexGrid, cell: usize, axis: usize, step: isize) -> Option<usize> {
    let mut pos: Vec<isize> = grid.cells[cell].iter().map(|&c| c as isize).collect();
    pos[axis] += step;
    grid.cell_at(&pos)
}

/// `g_ab = D_ab Phi` at every cell.
fn fluxes(phi: &[f64], coeffs: &CoefficientField) -> Vec<Vec<Vec<f64>>> {
    phi.iter()
        .enumerate()
        .map(|(c, &v)| {
            coeffs
                .at_cell(c)
                .iter()
                .map(|row| row.iter().map(|d| d * v).collect())
                .collect()
        })
        .collect()
}

/// Central difference of `g_ab` along `b` at `cell`; a missing neighbour is
/// a ghost with the opposite value, so `Phi` vanishes on the wall.
fn cross_derivative(
    grid: &SimplexGrid,
    g: &[Vec<Vec<f64>>],
    cell: usize,
    a: usize,
    b: usize,
) -> f64 {
    let own = g[cell][a][b];
    let hi = neighbour(grid, cell, b, 1).map_or(-own, |n| g[n][a][b]);
    let lo = neighbour(grid, cell, b, -1).map_or(-own, |n| g[n][a][b]);
    (hi - lo) / (2.0 * grid.spacing())
}

struct Transfer {
    from: usize,
    to: Option<usize>,
    amount: f64,
}

/// Explicit finite-volume step of `dPhi/dt = sum_ab d_a d_b (D_ab Phi)`.
///
/// Interior faces carry `J_a = sum_b d_b (D_ab Phi)`. A wall face carries the
/// current of a density falling linearly to zero at the wall, with `D`
/// evaluated on the wall; walls only absorb. Outgoing transfers of a cell are
/// scaled down together when they would exceed its content.
pub fn fp_step(
    density: &FPDensity,
    grid: &SimplexGrid,
    coeffs: &CoefficientField,
    dt: f64,
) -> Result<FPDensity, FpError> {
    let limit = stable_dt(grid, coeffs);
    if !(dt >= 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(FpError::Unstable { dt, limit });
    }
    if density.phi.len() != grid.len() {
        return Err(FpError::InvalidDensity(format!(
            "{} values on {} cells",
            density.phi.len(),
            grid.len()
        )));
    }
    let phi = &density.phi;
    let h = grid.spacing();
    let dims = grid.dims();
    let g = fluxes(phi, coeffs);
    let mut transfers = Vec::new();
    for c in 0..grid.len() {
        for a in 0..dims {
            match neighbour(grid, c, a, 1) {
                Some(r) => {
                    let mut j = (g[r][a][a] - g[c][a][a]) / h;
                    for b in (0..dims).filter(|&b| b != a) {
                        j += 0.5
                            * (cross_derivative(grid, &g, c, a, b)
                                + cross_derivative(grid, &g, r, a, b));
                    }
                    let t = -j * dt / h;
                    if t > 0.0 {
                        transfers.push(Transfer {
                            from: c,
                            to: Some(r),
                            amount: t,
                        });
                    } else if t < 0.0 {
                        transfers.push(Transfer {
                            from: r,
                            to: Some(c),
                            amount: -t,
                        });
                    }
                }
                None => transfers.push(wall(grid, coeffs, phi, c, a, 1, dt)),
            }
            if neighbour(grid, c, a, -1).is_none() {
                transfers.push(wall(grid, coeffs, phi, c, a, -1, dt));
            }
        }
    }
    let mut outgoing = vec![0.0; grid.len()];
    for t in &transfers {
        outgoing[t.from] += t.amount;
    }
    let scale: Vec<f64> = outgoing
        .iter()
        .zip(phi)
        .map(|(&out, &v)| if out > v { v / out } else { 1.0 })
        .collect();
    let mut next = phi.clone();
    for t in &transfers {
        let amount = t.amount * scale[t.from];
        next[t.from] -= amount;
        if let Some(to) = t.to {
            next[to] += amount;
        }
    }
    next.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(FPDensity {
        phi: next,
        time: density.time + dt,
    })
}

fn wall_position(grid: &SimplexGrid, cell: usize, axis: usize, side: isize) -> Vec<f64> {
    let mut x: Vec<f64> = grid.cells[cell].iter().map(|&c| c as f64 + 0.5).collect();
    x[axis] += 0.5 * side as f64;
    grid.coordinates(&x)
}

fn wall_current(
    grid: &SimplexGrid,
    coeffs: &CoefficientField,
    phi: f64,
    cell: usize,
    axis: usize,
    side: isize,
) -> f64 {
    let d = coeffs.block(&wall_position(grid, cell, axis, side))[axis][axis];
    (2.0 * d * phi / grid.spacing()).max(0.0)
}

fn wall(
    grid: &SimplexGrid,
    coeffs: &CoefficientField,
    phi: &[f64],
    cell: usize,
    axis: usize,
    side: isize,
    dt: f64,
) -> Transfer {
    Transfer {
        from: cell,
        to: None,
        amount: wall_current(grid, coeffs, phi[cell], cell, axis, side) * dt / grid.spacing(),
    }
}

/// Current through one wall face of a boundary cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundaryCurrent {
    pub cell: usize,
    pub axis: usize,
    /// `+1` for the high wall of the axis, `-1` for the low wall.
    pub side: i8,
    /// Probability leaving through the face per unit time and area, `-J.n`.
    pub outward: f64,
}

/// Current through every wall face, as the solver removes it: a density
/// falling linearly from the cell value to zero at the wall, with `D`
/// evaluated on the wall. Multiplying by the face area `h^(K-2)` and summing
/// gives the rate of mass loss of an unclipped step.
pub fn boundary_current(
    density: &FPDensity,
    grid: &SimplexGrid,
    coeffs: &CoefficientField,
) -> Vec<BoundaryCurrent> {
    let mut out = Vec::new();
    for c in 0..grid.len() {
        for a in 0..grid.dims() {
            for side in [-1isize, 1] {
                if neighbour(grid, c, a, side).is_some() {
                    continue;
                }
                out.push(BoundaryCurrent {
                    cell: c,
                    axis: a,
                    side: side as i8,
                    outward: wall_current(grid, coeffs, density.phi[c], c, a, side),
                });
            }
        }
    }
    out
}
