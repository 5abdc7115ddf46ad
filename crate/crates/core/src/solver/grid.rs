//! Periodic uniform grids in one or two dimensions.

use crate::error::{Result, VlbmError};

/// Minimum number of cells per axis.
pub const MIN_CELLS: usize = 4;

/// A periodic grid on `[0, L_x)` (or `[0, L_x) x [0, L_y)`) with cell
/// coordinates `x_i = i * dx`. Cells are stored row-major: `idx = i + nx * j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 2],
    lengths: [f64; 2],
}

impl Grid {
    pub fn new_1d(nx: usize, length: f64) -> Result<Self> {
        Self::build(1, [nx, 1], [length, 1.0])
    }

    pub fn new_2d(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::build(2, [nx, ny], [lx, ly])
    }

    /// Unit interval or unit square.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        match dim {
            1 => Self::new_1d(n, 1.0),
            2 => Self::new_2d(n, n, 1.0, 1.0),
            _ => Err(VlbmError::InvalidParameter(format!(
                "grid dimension must be 1 or 2, got {dim}"
            ))),
        }
    }

    /// `[0, 2 pi)` on every axis.
    pub fn two_pi(dim: usize, n: usize) -> Result<Self> {
        let l = 2.0 * std::f64::consts::PI;
        match dim {
            1 => Self::new_1d(n, l),
            2 => Self::new_2d(n, n, l, l),
            _ => Err(VlbmError::InvalidParameter(format!(
                "grid dimension must be 1 or 2, got {dim}"
            ))),
        }
    }

    fn build(dim: usize, n: [usize; 2], lengths: [f64; 2]) -> Result<Self> {
        for axis in 0..dim {
            if n[axis] < MIN_CELLS {
                return Err(VlbmError::InvalidParameter(format!(
                    "grid needs at least {MIN_CELLS} cells per axis, got {}",
                    n[axis]
                )));
            }
            if !(lengths[axis].is_finite() && lengths[axis] > 0.0) {
                return Err(VlbmError::InvalidParameter(format!(
                    "domain length must be positive, got {}",
                    lengths[axis]
                )));
            }
        }
        Ok(Self { dim, n, lengths })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells along `axis`; 1 for the unused axis of a 1-d grid.
    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    pub fn dx(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.n[axis] as f64
    }

    pub fn n_cells(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Measure of one cell (`dx` or `dx dy`).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.dx(a)).product()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.n[0] * j
    }

    /// Index of `(i + di, j + dj)` with periodic wrap-around.
    pub fn wrap_index(&self, i: isize, j: isize) -> usize {
        let nx = self.n[0] as isize;
        let ny = self.n[1] as isize;
        self.index(i.rem_euclid(nx) as usize, j.rem_euclid(ny) as usize)
    }

    /// Coordinates of a cell; the second entry is 0 on 1-d grids.
    pub fn coords(&self, cell: usize) -> [f64; 2] {
        let i = cell % self.n[0];
        let j = cell / self.n[0];
        let y = if self.dim == 2 {
            j as f64 * self.dx(1)
        } else {
            0.0
        };
        [i as f64 * self.dx(0), y]
    }
}
