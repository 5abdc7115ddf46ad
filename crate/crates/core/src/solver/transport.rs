//! Free transport `F_k(X, t + dt) = F_k(X - dt V_k, t)` on periodic grids.
//!
//! Two backends are available. `GridShift` permutes cell values and needs
//! every shift `dt V_k` to be a whole number of cells. `Spectral` multiplies
//! each Fourier mode by `exp(-i kappa . V_k dt)` and keeps the real part,
//! which is exact for band-limited data and any `dt`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, VlbmError};
use crate::lattice::VelocitySet;
use crate::solver::field::KineticField;
use crate::solver::grid::Grid;

/// Largest distance from an integer accepted as a whole-cell shift.
pub const SHIFT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportBackend {
    GridShift,
    Spectral,
}

impl fmt::Display for TransportBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GridShift => "grid-shift",
            Self::Spectral => "spectral",
        })
    }
}

impl FromStr for TransportBackend {
    type Err = VlbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "grid-shift" | "shift" => Ok(Self::GridShift),
            "spectral" | "fourier" => Ok(Self::Spectral),
            other => Err(VlbmError::InvalidParameter(format!(
                "unknown transport backend {other:?}"
            ))),
        }
    }
}

/// Whole-cell shift of `distance` on an axis with spacing `dx`.
pub fn cell_shift(distance: f64, dx: f64) -> Result<isize> {
    let cells = distance / dx;
    let rounded = cells.round();
    if (cells - rounded).abs() > SHIFT_TOLERANCE {
        return Err(VlbmError::Configuration(format!(
            "shift of {distance} is {cells} cells, not a whole number; use the spectral backend \
             or choose dt with lambda dt a multiple of dx"
        )));
    }
    Ok(rounded as isize)
}

/// Applies transport steps for one grid and velocity set.
#[derive(Clone)]
pub struct Transporter {
    backend: TransportBackend,
    grid: Grid,
    velocities: Vec<[f64; 2]>,
    m: usize,
    ffts: Option<SpectralPlans>,
}

#[derive(Clone)]
struct SpectralPlans {
    forward: [Arc<dyn Fft<f64>>; 2],
    inverse: [Arc<dyn Fft<f64>>; 2],
    wavenumbers: [Vec<f64>; 2],
}

impl fmt::Debug for Transporter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transporter")
            .field("backend", &self.backend)
            .field("grid", &self.grid)
            .field("velocities", &self.velocities)
            .finish()
    }
}

fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let signed = if j <= n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            2.0 * PI * signed / length
        })
        .collect()
}

impl Transporter {
    pub fn new(backend: TransportBackend, grid: &Grid, vs: &VelocitySet) -> Result<Self> {
        if grid.dim() != vs.dim() {
            return Err(VlbmError::DimensionMismatch {
                expected: vs.dim(),
                got: grid.dim(),
            });
        }
        let ffts = match backend {
            TransportBackend::GridShift => None,
            TransportBackend::Spectral => {
                let mut planner = FftPlanner::new();
                let (nx, ny) = (grid.n(0), grid.n(1));
                Some(SpectralPlans {
                    forward: [planner.plan_fft_forward(nx), planner.plan_fft_forward(ny)],
                    inverse: [planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny)],
                    wavenumbers: [
                        wavenumbers(nx, grid.length(0)),
                        wavenumbers(ny, grid.length(1)),
                    ],
                })
            }
        };
        Ok(Self {
            backend,
            grid: grid.clone(),
            velocities: vs.velocities().to_vec(),
            m: vs.m(),
            ffts,
        })
    }

    pub fn backend(&self) -> TransportBackend {
        self.backend
    }

    /// Checks that a step of `dt` is representable by this backend.
    pub fn check_step(&self, dt: f64) -> Result<()> {
        if !dt.is_finite() {
            return Err(VlbmError::InvalidParameter(format!(
                "time step must be finite, got {dt}"
            )));
        }
        if self.backend == TransportBackend::GridShift {
            for v in &self.velocities {
                for axis in 0..self.grid.dim() {
                    cell_shift(v[axis] * dt, self.grid.dx(axis))?;
                }
            }
        }
        Ok(())
    }

    /// Translates every `F_k` by `dt V_k` (negative `dt` moves backwards).
    pub fn apply(&self, field: &mut KineticField, dt: f64) -> Result<()> {
        if field.grid() != &self.grid {
            return Err(VlbmError::InvalidParameter(
                "field grid differs from transporter grid".into(),
            ));
        }
        self.check_step(dt)?;
        if dt == 0.0 {
            return Ok(());
        }
        match self.backend {
            TransportBackend::GridShift => self.apply_shift(field, dt),
            TransportBackend::Spectral => {
                self.apply_spectral(field, dt);
                Ok(())
            }
        }
    }

    fn apply_shift(&self, field: &mut KineticField, dt: f64) -> Result<()> {
        let (nx, ny) = (self.grid.n(0), self.grid.n(1));
        let m = self.m;
        let mut scratch = vec![0.0; self.grid.n_cells()];
        for (k, v) in self.velocities.iter().enumerate() {
            let sx = cell_shift(v[0] * dt, self.grid.dx(0))?.rem_euclid(nx as isize) as usize;
            let sy = if self.grid.dim() == 2 {
                cell_shift(v[1] * dt, self.grid.dx(1))?.rem_euclid(ny as isize) as usize
            } else {
                0
            };
            if sx == 0 && sy == 0 {
                continue;
            }
            for arr in &mut field.arrays_mut()[k * m..(k + 1) * m] {
                for j in 0..ny {
                    let src_row = (j + ny - sy) % ny;
                    let src = &arr[src_row * nx..(src_row + 1) * nx];
                    let dst = &mut scratch[j * nx..(j + 1) * nx];
                    dst[sx..].copy_from_slice(&src[..nx - sx]);
                    dst[..sx].copy_from_slice(&src[nx - sx..]);
                }
                arr.copy_from_slice(&scratch);
            }
        }
        Ok(())
    }

    fn apply_spectral(&self, field: &mut KineticField, dt: f64) {
        let plans = self.ffts.as_ref().expect("spectral plans");
        let (nx, ny) = (self.grid.n(0), self.grid.n(1));
        let m = self.m;
        let norm = 1.0 / (nx * ny) as f64;
        let mut buf = vec![Complex64::new(0.0, 0.0); nx * ny];
        let mut column = vec![Complex64::new(0.0, 0.0); ny];
        for (k, v) in self.velocities.iter().enumerate() {
            for arr in &mut field.arrays_mut()[k * m..(k + 1) * m] {
                for (b, a) in buf.iter_mut().zip(arr.iter()) {
                    *b = Complex64::new(*a, 0.0);
                }
                self.fft_2d(&mut buf, &mut column, &plans.forward);
                for j in 0..ny {
                    let ky = plans.wavenumbers[1][j];
                    for i in 0..nx {
                        let kx = plans.wavenumbers[0][i];
                        let phase = -(kx * v[0] + ky * v[1]) * dt;
                        buf[i + nx * j] *= Complex64::from_polar(1.0, phase);
                    }
                }
                self.fft_2d(&mut buf, &mut column, &plans.inverse);
                for (a, b) in arr.iter_mut().zip(&buf) {
                    *a = b.re * norm;
                }
            }
        }
    }

    fn fft_2d(
        &self,
        buf: &mut [Complex64],
        column: &mut [Complex64],
        plans: &[Arc<dyn Fft<f64>>; 2],
    ) {
        let (nx, ny) = (self.grid.n(0), self.grid.n(1));
        plans[0].process(buf);
        if ny > 1 {
            for i in 0..nx {
                for j in 0..ny {
                    column[j] = buf[i + nx * j];
                }
                plans[1].process(column);
                for j in 0..ny {
                    buf[i + nx * j] = column[j];
                }
            }
        }
    }
}

/// One transport step of `dt_sub` with a temporary [`Transporter`].
pub fn transport_step(
    field: &mut KineticField,
    vs: &VelocitySet,
    backend: TransportBackend,
    dt_sub: f64,
) -> Result<()> {
    let grid = field.grid().clone();
    Transporter::new(backend, &grid, vs)?.apply(field, dt_sub)
}
