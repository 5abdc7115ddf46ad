//! Equivalent systems of the split schemes in moment variables.
//!
//! For a scalar law (`m = 1`) the moment vector `Y = (w, y_1, .., z)`
//! satisfies, up to the stated order,
//!
//! ```text
//! d_t Y + (r / dt) (0, Y_2, ..) + sum_i A^i d_i Y - dt sum_ij B^ij d_ij Y = 0.
//! ```
//!
//! The matrices are the hard-coded closed forms for D1Q2 (with the second
//! order block `B`), D2Q3 and D2Q4 (first order only).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_len, Result, VlbmError};
use crate::lattice::ModelKind;

/// `omega^2 - 2 omega + 2`.
fn q2(omega: f64) -> f64 {
    omega * omega - 2.0 * omega + 2.0
}

/// `omega^4 - 4 omega^3 + 6 omega^2 - 4 omega + 2`.
fn q4(omega: f64) -> f64 {
    let o = omega;
    o.powi(4) - 4.0 * o.powi(3) + 6.0 * o * o - 4.0 * o + 2.0
}

/// Stiff relaxation coefficient `r(omega) = -omega (omega - 2) (omega^2 - 2 omega + 2) / (2 (omega - 1)^2)`.
///
/// Non-negative on `(1, 2]` and zero at `omega = 2`.
pub fn stiff_coefficient(omega: f64) -> Result<f64> {
    check_omega(omega)?;
    Ok(-omega * (omega - 2.0) * q2(omega) / (2.0 * (omega - 1.0).powi(2)))
}

fn check_omega(omega: f64) -> Result<()> {
    if omega == 1.0 {
        return Err(VlbmError::SingularCoefficient(
            "equivalent-system coefficients have a (omega - 1)^2 denominator".into(),
        ));
    }
    if !(omega > 1.0 && omega <= 2.0) {
        return Err(VlbmError::InvalidParameter(format!(
            "omega must lie in (1, 2], got {omega}"
        )));
    }
    Ok(())
}

pub(crate) fn check_lambda_velocity(model: ModelKind, lambda: f64, velocity: &[f64]) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(VlbmError::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    check_len(model.dim(), velocity.len())?;
    if velocity.iter().any(|v| !v.is_finite()) {
        return Err(VlbmError::InvalidParameter(
            "velocity must be finite".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentSystem {
    pub model: ModelKind,
    pub omega: f64,
    pub lambda: f64,
    /// Transport velocity: `(v)` for D1Q2, `(a, b)` for the 2-d models.
    pub velocity: Vec<f64>,
    /// Stiff coefficient `r(omega)`.
    pub stiff: f64,
    /// First-order matrices `A^i`, one per direction.
    pub a: Vec<DMatrix<f64>>,
    /// Second-order matrix `B^{1,1}` (D1Q2 only).
    pub b: Option<DMatrix<f64>>,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl EquivalentSystem {
    pub fn new(model: ModelKind, omega: f64, lambda: f64, velocity: &[f64]) -> Result<Self> {
        check_omega(omega)?;
        check_lambda_velocity(model, lambda, velocity)?;
        let stiff = stiff_coefficient(omega)?;
        let om1 = (omega - 1.0).powi(2);
        let l = lambda;
        let (a, b, gamma1, gamma2) = match model {
            ModelKind::D1Q2 => {
                let v = velocity[0];
                let g1 = (omega - 2.0).powi(2) * q2(omega) / (8.0 * om1);
                let g2 = q4(omega) / (2.0 * om1);
                let d = l * l - v * v;
                let a = DMatrix::from_row_slice(2, 2, &[v, g1, d * g1, -v * g2]);
                let o2 = omega * omega;
                let s = -omega * (omega - 2.0) / (32.0 * om1);
                let b11 = -(o2 - 6.0 * omega + 6.0) * d;
                let b12 = 3.0 * v * q2(omega);
                let b21 = 3.0 * v * d * q2(omega);
                let b22 = -5.0 * v * v * o2 - 3.0 * l * l * o2
                    + 6.0 * v * v * omega
                    + 10.0 * l * l * omega
                    - 6.0 * v * v
                    - 10.0 * l * l;
                let b = DMatrix::from_row_slice(2, 2, &[b11, b12, b21, b22]) * s;
                (vec![a], Some(b), g1, g2)
            }
            ModelKind::D2Q3 => {
                let (av, bv) = (velocity[0], velocity[1]);
                let g1 = -q2(omega) * (omega - 2.0).powi(2) / (16.0 * om1);
                let g2 = -q4(omega) / (4.0 * om1);
                let a1 = DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        av,
                        -2.0 * g1,
                        0.0,
                        g1 * (2.0 * av + l) * (av - l),
                        g2 * (2.0 * av - l),
                        0.0,
                        g1 * bv * (2.0 * av + l),
                        2.0 * bv * g2,
                        g2 * l,
                    ],
                );
                let a2 = DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        bv,
                        0.0,
                        -2.0 * g1,
                        g1 * bv * (2.0 * av + l),
                        0.0,
                        g2 * (2.0 * av + l),
                        g1 * (av * l + 2.0 * bv * bv - l * l),
                        g2 * l,
                        2.0 * bv * g2,
                    ],
                );
                (vec![a1, a2], None, g1, g2)
            }
            ModelKind::D2Q4 => {
                let (av, bv) = (velocity[0], velocity[1]);
                let g1 = (omega - 2.0).powi(2) * q2(omega) / (16.0 * om1);
                let g2 = q4(omega) / (4.0 * om1);
                let l2 = l * l;
                let a1 = DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        av,
                        2.0 * g1,
                        0.0,
                        0.0,
                        g1 * (l2 - 2.0 * av * av),
                        -2.0 * av * g2,
                        0.0,
                        g2,
                        -2.0 * av * bv * g1,
                        -2.0 * bv * g2,
                        0.0,
                        0.0,
                        2.0 * l2 * av * g1,
                        2.0 * l2 * g2,
                        0.0,
                        0.0,
                    ],
                );
                let a2 = DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        bv,
                        0.0,
                        2.0 * g1,
                        0.0,
                        -2.0 * av * bv * g1,
                        0.0,
                        -2.0 * av * g2,
                        0.0,
                        g1 * (l2 - 2.0 * bv * bv),
                        0.0,
                        -2.0 * bv * g2,
                        -g2,
                        -2.0 * l2 * bv * g1,
                        0.0,
                        -2.0 * l2 * g2,
                        0.0,
                    ],
                );
                (vec![a1, a2], None, g1, g2)
            }
        };
        Ok(Self {
            model,
            omega,
            lambda,
            velocity: velocity.to_vec(),
            stiff,
            a,
            b,
            gamma1,
            gamma2,
        })
    }

    /// Size of the moment vector, `n_v`.
    pub fn size(&self) -> usize {
        self.model.n_velocities()
    }

    /// `R = diag(0, r, .., r)`.
    pub fn relaxation_matrix(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut r = DMatrix::zeros(n, n);
        for i in 1..n {
            r[(i, i)] = self.stiff;
        }
        r
    }

    /// Evolution matrix `-(R / dt + i sum_i k_i A^i + dt |k|^2 B)` of plane
    /// waves `Y = Y_0 exp(gamma t + i k.x)`; its eigenvalues are the growth
    /// rates `gamma`.
    pub fn mode_matrix(&self, wavevector: &[f64], dt: f64) -> Result<DMatrix<Complex64>> {
        check_len(self.model.dim(), wavevector.len())?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(VlbmError::InvalidParameter(format!(
                "dt must be positive, got {dt}"
            )));
        }
        let n = self.size();
        let i = Complex64::new(0.0, 1.0);
        let mut m = self
            .relaxation_matrix()
            .map(|x| Complex64::new(x / dt, 0.0));
        for (k, a) in wavevector.iter().zip(&self.a) {
            m += a.map(|x| i * (k * x));
        }
        if let Some(b) = &self.b {
            let k2: f64 = wavevector.iter().map(|k| k * k).sum();
            m += b.map(|x| Complex64::new(dt * k2 * x, 0.0));
        }
        debug_assert_eq!(m.nrows(), n);
        Ok(-m)
    }
}
