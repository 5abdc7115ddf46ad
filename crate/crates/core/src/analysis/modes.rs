//! Plane-wave particular solutions `(w, y) = Re((w0, y0) exp(gamma t + i k.x))`.
//!
//! `mode_eqeq` solves the scalar equivalent equation (advection-diffusion)
//! and recovers the flux error from the gradient of `w`. `mode_eqsys`
//! takes the slow eigenpair of the equivalent system, whose other
//! eigenvalues decay like `1 / dt`.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analysis::equivalent::EquivalentSystem;
use crate::error::{Result, VlbmError};
use crate::io::fmt_f64;
use crate::lattice::ModelKind;
use crate::linalg;

/// Relative tolerance below which two eigenvalues are treated as equal.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Solution of the equivalent equation on `w`.
    EqEq,
    /// Slow mode of the equivalent system on `Y`.
    EqSys,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub kind: ModeKind,
    pub wavevector: Vec<f64>,
    pub gamma: Complex64,
    pub w0: f64,
    /// Flux-error amplitudes (and the supplementary moment for D2Q4).
    pub y0: Vec<Complex64>,
    pub dt: f64,
}

impl ModeSolution {
    fn phase(&self, x: &[f64], t: f64) -> Complex64 {
        let kx: f64 = self.wavevector.iter().zip(x).map(|(k, xi)| k * xi).sum();
        (self.gamma * t + Complex64::new(0.0, kx)).exp()
    }

    /// Real moment vector `(w, y_1, ..)` at position `x` and time `t`.
    pub fn evaluate(&self, x: &[f64], t: f64) -> Vec<f64> {
        let e = self.phase(x, t);
        let mut out = Vec::with_capacity(1 + self.y0.len());
        out.push((self.w0 * e).re);
        out.extend(self.y0.iter().map(|y| (y * e).re));
        out
    }

    pub fn w(&self, x: &[f64], t: f64) -> f64 {
        (self.w0 * self.phase(x, t)).re
    }

    /// First flux-error component at `(x, t)`.
    pub fn y(&self, x: &[f64], t: f64) -> f64 {
        (self.y0[0] * self.phase(x, t)).re
    }

    /// `||(gamma I - E)(w0, y0)|| / ||(w0, y0)||` with `E` the evolution
    /// matrix of `sys`.
    pub fn residual(&self, sys: &EquivalentSystem) -> Result<f64> {
        let e = sys.mode_matrix(&self.wavevector, self.dt)?;
        let mut v = vec![Complex64::new(self.w0, 0.0)];
        v.extend_from_slice(&self.y0);
        let n = v.len();
        let shifted = DMatrix::<Complex64>::identity(n, n) * self.gamma - e;
        let mut num = 0.0;
        for i in 0..n {
            let r: Complex64 = (0..n).map(|j| shifted[(i, j)] * v[j]).sum();
            num += r.norm_sqr();
        }
        let den: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Ok((num / den).sqrt())
    }

    /// One CSV row `k,re_gamma,im_gamma,re_y0,im_y0` (first wavevector and
    /// first flux-error component).
    pub fn write_csv_row<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(self.wavevector[0]),
            fmt_f64(self.gamma.re),
            fmt_f64(self.gamma.im),
            fmt_f64(self.y0[0].re),
            fmt_f64(self.y0[0].im)
        )
    }
}

pub const MODE_CSV_HEADER: &str = "k,re_gamma,im_gamma,re_y0,im_y0";

fn check_mode_params(omega: f64, lambda: f64, v: f64, dt: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&omega) {
        return Err(VlbmError::InvalidParameter(format!(
            "omega must lie in [1, 2], got {omega}"
        )));
    }
    if !(lambda > v.abs()) {
        return Err(VlbmError::InvalidParameter(format!(
            "modes need lambda > |v| (lambda = {lambda}, v = {v})"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(VlbmError::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    Ok(())
}

/// D1Q2 equivalent-equation mode:
/// `gamma = -(dt/2)(1/omega - 1/2) k^2 (lambda^2 - v^2) - i v k` and
/// `y0 = i k (lambda^2 - v^2) (omega - 2) / (4 omega) dt w0`.
pub fn mode_eqeq(
    k: f64,
    omega: f64,
    lambda: f64,
    v: f64,
    w0: f64,
    dt: f64,
) -> Result<ModeSolution> {
    check_mode_params(omega, lambda, v, dt)?;
    let d = lambda * lambda - v * v;
    let gamma = Complex64::new(-(dt / 2.0) * (1.0 / omega - 0.5) * k * k * d, -v * k);
    let y0 = Complex64::new(0.0, k * d * (omega - 2.0) / (4.0 * omega) * dt * w0);
    Ok(ModeSolution {
        kind: ModeKind::EqEq,
        wavevector: vec![k],
        gamma,
        w0,
        y0: vec![y0],
        dt,
    })
}

/// D1Q2 equivalent-system slow mode with `w`-amplitude `w0`.
pub fn mode_eqsys(
    k: f64,
    omega: f64,
    lambda: f64,
    v: f64,
    w0: f64,
    dt: f64,
) -> Result<ModeSolution> {
    check_mode_params(omega, lambda, v, dt)?;
    let sys = EquivalentSystem::new(ModelKind::D1Q2, omega, lambda, &[v])?;
    slow_mode(&sys, &[k], w0, dt)
}

/// Slow mode of any equivalent system (first order only for 2-d models).
///
/// The slow eigenvalue is the one with the smallest `|Re gamma|`. Ties are
/// broken by the largest `w`-weight `|v_0| / ||v||` of the eigenvector;
/// a remaining tie or coincident eigenvalues give `DegenerateMode`.
pub fn slow_mode(
    sys: &EquivalentSystem,
    wavevector: &[f64],
    w0: f64,
    dt: f64,
) -> Result<ModeSolution> {
    let e = sys.mode_matrix(wavevector, dt)?;
    let eigs = linalg::eigenvalues(&e);
    let scale = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = COINCIDENCE_TOLERANCE * scale;

    let mut candidates: Vec<(Complex64, f64)> = Vec::new();
    let min_re = eigs
        .iter()
        .map(|z| z.re.abs())
        .fold(f64::INFINITY, f64::min);
    for &g in &eigs {
        if g.re.abs() - min_re <= tol {
            candidates.push((g, w_weight(&e, g)));
        }
    }
    let (gamma, weight) =
        candidates
            .iter()
            .copied()
            .fold((Complex64::new(0.0, 0.0), -1.0), |best, c| {
                if c.1 > best.1 {
                    c
                } else {
                    best
                }
            });
    for (g, wgt) in &candidates {
        if (*g - gamma).norm() > tol && (wgt - weight).abs() <= 1e-12 {
            return Err(VlbmError::DegenerateMode(format!(
                "slow eigenvalues {gamma} and {g} cannot be told apart"
            )));
        }
    }
    if eigs
        .iter()
        .any(|g| (*g - gamma).norm() > 0.0 && (*g - gamma).norm() <= tol)
    {
        return Err(VlbmError::DegenerateMode(format!(
            "eigenvalue {gamma} is repeated"
        )));
    }
    if weight <= 0.0 {
        return Err(VlbmError::DegenerateMode(format!(
            "slow eigenvector at {gamma} has no w component"
        )));
    }
    let v = linalg::kernel_vector(&e, gamma, w0).ok_or_else(|| {
        VlbmError::DegenerateMode(format!("slow eigenvector at {gamma} has no w component"))
    })?;
    Ok(ModeSolution {
        kind: ModeKind::EqSys,
        wavevector: wavevector.to_vec(),
        gamma,
        w0,
        y0: v[1..].to_vec(),
        dt,
    })
}

/// `|v_0| / ||v||` for the eigenvector of `e` at `gamma` (0 if none).
fn w_weight(e: &DMatrix<Complex64>, gamma: Complex64) -> f64 {
    match linalg::kernel_vector(e, gamma, 1.0) {
        Some(v) => 1.0 / v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        None => 0.0,
    }
}
