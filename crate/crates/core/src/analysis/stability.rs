//! Diffusion matrices, symmetrizers and the stability predicates built on them.

use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::analysis::equivalent::check_lambda_velocity;
use crate::error::{Result, VlbmError};
use crate::io::fmt_f64;
use crate::lattice::ModelKind;
use crate::linalg;

/// Diffusion matrix `D` of the equivalent equation
/// `d_t w + div(V w) = (1/omega - 1/2) (dt / 2) div(D grad w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix {
    pub model: ModelKind,
    pub matrix: DMatrix<f64>,
}

impl DiffusionMatrix {
    /// Scalar factor `(1/omega - 1/2) dt / 2` in front of the diffusion term.
    pub fn prefactor(omega: f64, dt: f64) -> f64 {
        (1.0 / omega - 0.5) * dt / 2.0
    }
}

pub fn diffusion_matrix(
    model: ModelKind,
    lambda: f64,
    velocity: &[f64],
) -> Result<DiffusionMatrix> {
    check_lambda_velocity(model, lambda, velocity)?;
    let l = lambda;
    let matrix = match model {
        ModelKind::D1Q2 => DMatrix::from_element(1, 1, l * l - velocity[0] * velocity[0]),
        ModelKind::D2Q3 => {
            let (a, b) = (velocity[0], velocity[1]);
            let off = -l * b / 2.0 - a * b;
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    l / 2.0 * (l + a) - a * a,
                    off,
                    off,
                    l / 2.0 * (l - a) - b * b,
                ],
            )
        }
        ModelKind::D2Q4 => {
            let (a, b) = (velocity[0], velocity[1]);
            DMatrix::from_row_slice(
                2,
                2,
                &[l * l / 2.0 - a * a, -a * b, -a * b, l * l / 2.0 - b * b],
            )
        }
    };
    Ok(DiffusionMatrix { model, matrix })
}

/// Radicand `(a^2 + b^2)^2 + lambda (6 a b^2 - 2 a^3) + lambda^2 (a^2 + b^2)`
/// of the D2Q3 diffusion eigenvalues.
fn d2q3_radicand(lambda: f64, a: f64, b: f64) -> f64 {
    let s = a * a + b * b;
    s * s + lambda * (-2.0 * a.powi(3) + 6.0 * a * b * b) + lambda * lambda * s
}

/// Diffusive stability: positivity of the diffusion matrix.
///
/// D1Q2: `|v| < lambda`. D2Q3: `lambda^2 - a^2 - b^2 - sqrt(radicand) > 0`.
/// D2Q4: `a^2 + b^2 <= lambda^2 / 2` (non-strict).
pub fn diffusive_stable(model: ModelKind, lambda: f64, velocity: &[f64]) -> Result<bool> {
    check_lambda_velocity(model, lambda, velocity)?;
    Ok(match model {
        ModelKind::D1Q2 => velocity[0].abs() < lambda,
        ModelKind::D2Q3 => {
            let (a, b) = (velocity[0], velocity[1]);
            let rad = d2q3_radicand(lambda, a, b);
            rad >= 0.0 && lambda * lambda - a * a - b * b - rad.sqrt() > 0.0
        }
        ModelKind::D2Q4 => {
            let (a, b) = (velocity[0], velocity[1]);
            a * a + b * b <= lambda * lambda / 2.0
        }
    })
}

/// Symmetrizer `P` of the first-order equivalent system (independent of
/// `omega`).
pub fn symmetrizer(model: ModelKind, lambda: f64, velocity: &[f64]) -> Result<DMatrix<f64>> {
    check_lambda_velocity(model, lambda, velocity)?;
    let l = lambda;
    Ok(match model {
        ModelKind::D1Q2 => {
            let v = velocity[0];
            let d = l * l - v * v;
            if d == 0.0 {
                return Err(VlbmError::SingularCoefficient(
                    "symmetrizer needs lambda != |v|".into(),
                ));
            }
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / d])
        }
        ModelKind::D2Q3 => {
            let (a, b) = (velocity[0], velocity[1]);
            let t = 2.0 * a + l;
            let e = a * a - 2.0 * a * l - 3.0 * b * b + l * l;
            DMatrix::from_row_slice(
                3,
                3,
                &[
                    l / 2.0 * e * t,
                    0.0,
                    0.0,
                    0.0,
                    -(a * l + 2.0 * b * b - l * l),
                    b * t,
                    0.0,
                    b * t,
                    -(a - l) * t,
                ],
            )
        }
        ModelKind::D2Q4 => {
            let (a, b) = (velocity[0], velocity[1]);
            let l2 = l * l;
            let ea = 4.0 * a * a - l2;
            let eb = 4.0 * b * b - l2;
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    l2 * ea * eb,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    -2.0 * l2 * eb,
                    0.0,
                    2.0 * a * eb,
                    0.0,
                    0.0,
                    -2.0 * l2 * ea,
                    -2.0 * b * ea,
                    0.0,
                    2.0 * a * eb,
                    -2.0 * b * ea,
                    -2.0 * a * a - 2.0 * b * b + l2,
                ],
            )
        }
    })
}

/// Leading principal minors of the symmetrizer in factored form.
///
/// Factoring avoids the cancellation of the expanded determinants, so the
/// sign of each minor is decided by the sign of its individual factors.
pub fn symmetrizer_minors(model: ModelKind, lambda: f64, velocity: &[f64]) -> Result<Vec<f64>> {
    check_lambda_velocity(model, lambda, velocity)?;
    let l = lambda;
    Ok(match model {
        ModelKind::D1Q2 => {
            let d = l * l - velocity[0] * velocity[0];
            vec![1.0, 1.0 / d]
        }
        ModelKind::D2Q3 => {
            let (a, b) = (velocity[0], velocity[1]);
            let t = 2.0 * a + l;
            let e = a * a - 2.0 * a * l - 3.0 * b * b + l * l;
            let m1 = l * t * e / 2.0;
            vec![
                m1,
                -m1 * (a * l + 2.0 * b * b - l * l),
                l * l * t * t * e * e / 2.0,
            ]
        }
        ModelKind::D2Q4 => {
            let (a, b) = (velocity[0], velocity[1]);
            let ea = (2.0 * a - l) * (2.0 * a + l);
            let eb = (2.0 * b - l) * (2.0 * b + l);
            vec![
                l * l * ea * eb,
                -2.0 * l.powi(4) * ea * eb * eb,
                4.0 * l.powi(6) * ea * ea * eb * eb,
                4.0 * l.powi(4) * (ea * eb).powi(3),
            ]
        }
    })
}

/// Hyperbolicity: the symmetrizer is positive definite (all leading
/// principal minors strictly positive).
pub fn hyperbolic(model: ModelKind, lambda: f64, velocity: &[f64]) -> Result<bool> {
    if model == ModelKind::D1Q2 && lambda * lambda == velocity.first().map_or(0.0, |v| v * v) {
        return Ok(false);
    }
    Ok(symmetrizer_minors(model, lambda, velocity)?
        .iter()
        .all(|m| *m > 0.0))
}

/// Hyperbolicity with a safety margin: minor `k` must exceed
/// `margin * max|P_ij|^k`. Shrinks the region slightly to absorb roundoff.
pub fn hyperbolic_with_margin(
    model: ModelKind,
    lambda: f64,
    velocity: &[f64],
    margin: f64,
) -> Result<bool> {
    if !hyperbolic(model, lambda, velocity)? {
        return Ok(false);
    }
    let p = symmetrizer(model, lambda, velocity)?;
    Ok(linalg::is_positive_definite(&p, margin))
}

/// Diffusive and hyperbolic flags sampled over `(a, b) = lambda (s_i, s_j)`
/// with `s` evenly spaced on `[-1.5, 1.5]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRaster {
    pub model: ModelKind,
    pub lambda: f64,
    pub resolution: usize,
    /// Sample velocities, `b` outer and `a` inner: index `i + resolution * j`.
    pub samples: Vec<[f64; 2]>,
    pub diffusive: Vec<bool>,
    pub hyperbolic: Vec<bool>,
}

/// Smallest accepted raster resolution.
pub const MIN_RESOLUTION: usize = 16;

/// Sample positions along one axis, in units of `lambda`.
pub fn raster_axis(resolution: usize) -> Vec<f64> {
    let step = 3.0 / (resolution - 1) as f64;
    (0..resolution).map(|i| -1.5 + i as f64 * step).collect()
}

pub fn stability_region(
    model: ModelKind,
    lambda: f64,
    resolution: usize,
) -> Result<StabilityRaster> {
    if model.dim() != 2 {
        return Err(VlbmError::Unsupported(format!(
            "stability rasters need a 2-d model, got {model}"
        )));
    }
    if resolution < MIN_RESOLUTION {
        return Err(VlbmError::InvalidParameter(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let axis = raster_axis(resolution);
    let mut samples = Vec::with_capacity(resolution * resolution);
    let mut diffusive = Vec::with_capacity(resolution * resolution);
    let mut hyper = Vec::with_capacity(resolution * resolution);
    for sb in &axis {
        for sa in &axis {
            let v = [lambda * sa, lambda * sb];
            samples.push(v);
            diffusive.push(diffusive_stable(model, lambda, &v)?);
            hyper.push(hyperbolic(model, lambda, &v)?);
        }
    }
    Ok(StabilityRaster {
        model,
        lambda,
        resolution,
        samples,
        diffusive,
        hyperbolic: hyper,
    })
}

impl StabilityRaster {
    /// CSV with header `a,b,diffusive,hyperbolic` and 0/1 flags.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "a,b,diffusive,hyperbolic")?;
        for ((v, d), h) in self
            .samples
            .iter()
            .zip(&self.diffusive)
            .zip(&self.hyperbolic)
        {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                u8::from(*d),
                u8::from(*h)
            )?;
        }
        Ok(())
    }
}
