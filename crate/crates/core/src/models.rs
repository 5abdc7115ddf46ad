//! Conservation laws solved by the kinetic schemes.
//!
//! Each law provides its flux `Q^i(W)`, flux Jacobian, a Lax entropy
//! `s(W)` with entropy flux, the entropy variables `W* = grad s(W)` and
//! their inverse, and (for the one-dimensional laws paired with D1Q2) the
//! dual kinetic entropies `s_1*, s_2*` whose gradients are the equilibria.
//!
//! Conserved vectors are ordered `(w)` for transport, `(h, hu)` for shallow
//! water and `(rho, rho u)` for isothermal Euler.

use nalgebra::DMatrix;

use crate::error::{check_len, Result, VlbmError};

/// Floor of the admissible set for water height and density.
pub const STATE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConservationLaw {
    /// `d_t w + v d_x w = 0`.
    Transport1D { velocity: f64 },
    /// `d_t w + d_1 (a w) + d_2 (b w) = 0`.
    Transport2D { a: f64, b: f64 },
    /// One-dimensional shallow water with gravity `g`.
    ShallowWater { gravity: f64 },
    /// One-dimensional isothermal Euler with sound speed `c`.
    IsothermalEuler { sound_speed: f64 },
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(VlbmError::InvalidParameter(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

impl ConservationLaw {
    pub fn transport_1d(velocity: f64) -> Result<Self> {
        if !velocity.is_finite() {
            return Err(VlbmError::InvalidParameter(
                "transport velocity must be finite".into(),
            ));
        }
        Ok(Self::Transport1D { velocity })
    }

    pub fn transport_2d(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(VlbmError::InvalidParameter(
                "transport velocity must be finite".into(),
            ));
        }
        Ok(Self::Transport2D { a, b })
    }

    pub fn shallow_water(gravity: f64) -> Result<Self> {
        require_positive("gravity", gravity)?;
        Ok(Self::ShallowWater { gravity })
    }

    pub fn isothermal_euler(sound_speed: f64) -> Result<Self> {
        require_positive("sound speed", sound_speed)?;
        Ok(Self::IsothermalEuler { sound_speed })
    }

    /// Number of conserved components `m`.
    pub fn m(&self) -> usize {
        match self {
            Self::Transport1D { .. } | Self::Transport2D { .. } => 1,
            Self::ShallowWater { .. } | Self::IsothermalEuler { .. } => 2,
        }
    }

    /// Space dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            Self::Transport2D { .. } => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Transport1D { .. } => "transport-1d",
            Self::Transport2D { .. } => "transport-2d",
            Self::ShallowWater { .. } => "shallow-water",
            Self::IsothermalEuler { .. } => "isothermal-euler",
        }
    }

    pub fn is_admissible(&self, w: &[f64]) -> bool {
        self.check_admissible(w).is_ok()
    }

    pub fn check_admissible(&self, w: &[f64]) -> Result<()> {
        check_len(self.m(), w.len())?;
        match self {
            Self::Transport1D { .. } | Self::Transport2D { .. } => Ok(()),
            Self::ShallowWater { .. } => {
                if w[0] > STATE_FLOOR && w[1].is_finite() {
                    Ok(())
                } else {
                    Err(VlbmError::Domain(format!(
                        "water height must exceed {STATE_FLOOR}, got {}",
                        w[0]
                    )))
                }
            }
            Self::IsothermalEuler { .. } => {
                if w[0] > STATE_FLOOR && w[1].is_finite() {
                    Ok(())
                } else {
                    Err(VlbmError::Domain(format!(
                        "density must exceed {STATE_FLOOR}, got {}",
                        w[0]
                    )))
                }
            }
        }
    }

    fn check_direction(&self, i: usize) -> Result<()> {
        if i < self.dim() {
            Ok(())
        } else {
            Err(VlbmError::InvalidParameter(format!(
                "direction {i} out of range for a {}-d law",
                self.dim()
            )))
        }
    }

    /// Flux `Q^i(W)` in direction `i` (0-based).
    pub fn flux(&self, w: &[f64], i: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m()];
        self.flux_into(w, i, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`Self::flux`] used on the hot path.
    pub(crate) fn flux_into(&self, w: &[f64], i: usize, out: &mut [f64]) -> Result<()> {
        self.check_direction(i)?;
        match *self {
            Self::Transport1D { velocity } => out[0] = velocity * w[0],
            Self::Transport2D { a, b } => out[0] = if i == 0 { a } else { b } * w[0],
            Self::ShallowWater { gravity } => {
                self.check_admissible(w)?;
                let (h, hu) = (w[0], w[1]);
                out[0] = hu;
                out[1] = hu * hu / h + 0.5 * gravity * h * h;
            }
            Self::IsothermalEuler { sound_speed } => {
                self.check_admissible(w)?;
                let (rho, rho_u) = (w[0], w[1]);
                out[0] = rho_u;
                out[1] = rho_u * rho_u / rho + sound_speed * sound_speed * rho;
            }
        }
        Ok(())
    }

    /// Jacobian `D_W Q^i(W)`.
    pub fn flux_jacobian(&self, w: &[f64], i: usize) -> Result<DMatrix<f64>> {
        self.check_direction(i)?;
        self.check_admissible(w)?;
        Ok(match *self {
            Self::Transport1D { velocity } => DMatrix::from_element(1, 1, velocity),
            Self::Transport2D { a, b } => DMatrix::from_element(1, 1, if i == 0 { a } else { b }),
            Self::ShallowWater { gravity } => {
                let u = w[1] / w[0];
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, gravity * w[0] - u * u, 2.0 * u])
            }
            Self::IsothermalEuler { sound_speed } => {
                let u = w[1] / w[0];
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[0.0, 1.0, sound_speed * sound_speed - u * u, 2.0 * u],
                )
            }
        })
    }

    /// Lax entropy `s(W)`.
    pub fn entropy(&self, w: &[f64]) -> Result<f64> {
        self.check_admissible(w)?;
        Ok(match *self {
            Self::Transport1D { .. } | Self::Transport2D { .. } => 0.5 * w[0] * w[0],
            Self::ShallowWater { gravity } => {
                let (h, u) = (w[0], w[1] / w[0]);
                0.5 * h * u * u + 0.5 * gravity * h * h
            }
            Self::IsothermalEuler { sound_speed } => {
                let (rho, u) = (w[0], w[1] / w[0]);
                0.5 * rho * u * u + sound_speed * sound_speed * rho * (rho.ln() - 1.0)
            }
        })
    }

    /// Entropy flux `g^i(W)`, satisfying `D s . D Q^i = D g^i`.
    pub fn entropy_flux(&self, w: &[f64], i: usize) -> Result<f64> {
        self.check_direction(i)?;
        self.check_admissible(w)?;
        Ok(match *self {
            Self::Transport1D { velocity } => 0.5 * velocity * w[0] * w[0],
            Self::Transport2D { a, b } => 0.5 * if i == 0 { a } else { b } * w[0] * w[0],
            Self::ShallowWater { gravity } => {
                let (h, u) = (w[0], w[1] / w[0]);
                0.5 * h * u.powi(3) + u * gravity * h * h
            }
            Self::IsothermalEuler { sound_speed } => {
                let (rho, u) = (w[0], w[1] / w[0]);
                u * (self.entropy(w)? + sound_speed * sound_speed * rho)
            }
        })
    }

    /// Hessian of `s` with respect to the conserved variables.
    pub fn entropy_hessian(&self, w: &[f64]) -> Result<DMatrix<f64>> {
        self.check_admissible(w)?;
        Ok(match *self {
            Self::Transport1D { .. } | Self::Transport2D { .. } => DMatrix::from_element(1, 1, 1.0),
            Self::ShallowWater { gravity } => {
                let (h, q) = (w[0], w[1]);
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        q * q / h.powi(3) + gravity,
                        -q / (h * h),
                        -q / (h * h),
                        1.0 / h,
                    ],
                )
            }
            Self::IsothermalEuler { sound_speed } => {
                let (rho, q) = (w[0], w[1]);
                let c2 = sound_speed * sound_speed;
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        q * q / rho.powi(3) + c2 / rho,
                        -q / (rho * rho),
                        -q / (rho * rho),
                        1.0 / rho,
                    ],
                )
            }
        })
    }

    /// Entropy variables `W* = grad s(W)`.
    pub fn entropy_variables(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_admissible(w)?;
        Ok(match *self {
            Self::Transport1D { .. } | Self::Transport2D { .. } => vec![w[0]],
            Self::ShallowWater { gravity } => {
                let (h, u) = (w[0], w[1] / w[0]);
                vec![gravity * h - 0.5 * u * u, u]
            }
            Self::IsothermalEuler { sound_speed } => {
                let (rho, u) = (w[0], w[1] / w[0]);
                vec![-0.5 * u * u + sound_speed * sound_speed * rho.ln(), u]
            }
        })
    }

    /// Inverse of [`Self::entropy_variables`].
    pub fn from_entropy_variables(&self, ws: &[f64]) -> Result<Vec<f64>> {
        check_len(self.m(), ws.len())?;
        let w = match *self {
            Self::Transport1D { .. } | Self::Transport2D { .. } => vec![ws[0]],
            Self::ShallowWater { gravity } => {
                let h = (2.0 * ws[0] + ws[1] * ws[1]) / (2.0 * gravity);
                vec![h, h * ws[1]]
            }
            Self::IsothermalEuler { sound_speed } => {
                let rho = ((2.0 * ws[0] + ws[1] * ws[1]) / (2.0 * sound_speed * sound_speed)).exp();
                vec![rho, rho * ws[1]]
            }
        };
        self.check_admissible(&w)?;
        Ok(w)
    }

    /// Dual kinetic entropies `(s_1*(W*), s_2*(W*))` of the D1Q2 model with
    /// kinetic speed `lambda`. Their gradients are the D1Q2 equilibria
    /// expressed in entropy variables.
    pub fn dual_kinetic_entropies(&self, lambda: f64, ws: &[f64]) -> Result<[f64; 2]> {
        require_positive("lambda", lambda)?;
        check_len(self.m(), ws.len())?;
        match *self {
            Self::Transport1D { velocity } => {
                let q = ws[0] * ws[0];
                Ok([
                    0.25 * (1.0 - velocity / lambda) * q,
                    0.25 * (1.0 + velocity / lambda) * q,
                ])
            }
            Self::ShallowWater { gravity } => {
                self.from_entropy_variables(ws)?;
                let s = (ws[1] * ws[1] + 2.0 * ws[0]).powi(2) / (16.0 * gravity * lambda);
                Ok([(lambda - ws[1]) * s, (lambda + ws[1]) * s])
            }
            Self::IsothermalEuler { sound_speed } => {
                let rho = self.from_entropy_variables(ws)?[0];
                // c^2 rho (lambda -+ u) / (2 lambda); the gradient of this is F_k^eq.
                let s = sound_speed * sound_speed * rho / (2.0 * lambda);
                Ok([s * (lambda - ws[1]), s * (lambda + ws[1])])
            }
            Self::Transport2D { .. } => Err(VlbmError::Unsupported(
                "dual kinetic entropies are defined for the 1-d laws with D1Q2".into(),
            )),
        }
    }

    /// Sub-characteristic condition of the D1Q2 kinetic model, evaluated
    /// with strict inequality.
    pub fn subcharacteristic_ok(&self, lambda: f64, w: &[f64]) -> Result<bool> {
        self.check_admissible(w)?;
        Ok(match *self {
            Self::Transport1D { velocity } => lambda > velocity.abs(),
            Self::ShallowWater { gravity } => {
                let (h, u) = (w[0], w[1] / w[0]);
                lambda > u.abs() + (gravity * h).sqrt()
            }
            Self::IsothermalEuler { sound_speed } => {
                let u = w[1] / w[0];
                lambda > sound_speed + u.abs()
            }
            Self::Transport2D { .. } => {
                return Err(VlbmError::Unsupported(
                    "the 2-d transport conditions depend on the lattice; see analysis::diffusive_stable".into(),
                ))
            }
        })
    }

    /// Hessians `D^2 s_1*`, `D^2 s_2*` of the shallow-water dual kinetic
    /// entropies, written in `(h, u)`.
    pub fn dual_hessians(&self, lambda: f64, w: &[f64]) -> Result<[DMatrix<f64>; 2]> {
        let Self::ShallowWater { gravity: g } = *self else {
            return Err(VlbmError::Unsupported(
                "dual Hessians are tabulated for shallow water only".into(),
            ));
        };
        self.check_admissible(w)?;
        let (h, u) = (w[0], w[1] / w[0]);
        let den = 2.0 * g * lambda;
        let h1 = DMatrix::from_row_slice(
            2,
            2,
            &[
                (lambda - u) / den,
                (-g * h + lambda * u - u * u) / den,
                (-g * h + lambda * u - u * u) / den,
                ((g * h + u * u) * lambda - 3.0 * h * u * g - u.powi(3)) / den,
            ],
        );
        let h2 = DMatrix::from_row_slice(
            2,
            2,
            &[
                (lambda + u) / den,
                (g * h + lambda * u + u * u) / den,
                (g * h + lambda * u + u * u) / den,
                ((g * h + u * u) * lambda + 3.0 * h * u * g + u.powi(3)) / den,
            ],
        );
        Ok([h1, h2])
    }

    /// Whether both shallow-water dual Hessians are positive definite
    /// (first diagonal entry and determinant strictly positive).
    ///
    /// The determinants are evaluated in the factored form
    /// `g h ((lambda -+ u)^2 - g h) / (2 g lambda)^2`, which avoids the
    /// cancellation of the expanded 2x2 determinant near the boundary.
    pub fn dual_hessian_pd(&self, lambda: f64, w: &[f64]) -> Result<bool> {
        let [h1, h2] = self.dual_hessians(lambda, w)?;
        let Self::ShallowWater { gravity: g } = *self else {
            unreachable!()
        };
        let (h, u) = (w[0], w[1] / w[0]);
        let gh = g * h;
        let det1 = gh * ((lambda - u).powi(2) - gh);
        let det2 = gh * ((lambda + u).powi(2) - gh);
        Ok(h1[(0, 0)] > 0.0 && h2[(0, 0)] > 0.0 && det1 > 0.0 && det2 > 0.0)
    }
}

/// Microscopic entropy of the D1Q2 transport model in `(W, y)` variables:
/// `W^2/2 + y^2 / (2 (lambda^2 - c^2))`.
pub fn microscopic_entropy_transport(c: f64, lambda: f64, w: f64, y: f64) -> Result<f64> {
    let denom = lambda * lambda - c * c;
    if !(lambda > c.abs()) || denom <= 0.0 {
        return Err(VlbmError::InvalidParameter(format!(
            "microscopic entropy needs lambda > |c| (lambda = {lambda}, c = {c})"
        )));
    }
    Ok(0.5 * w * w + y * y / (2.0 * denom))
}

/// The same entropy written with the kinetic entropies
/// `s_1(F_1) = lambda/(lambda - c) F_1^2`, `s_2(F_2) = lambda/(lambda + c) F_2^2`.
pub fn kinetic_entropy_transport(c: f64, lambda: f64, f1: f64, f2: f64) -> Result<f64> {
    if !(lambda > c.abs()) {
        return Err(VlbmError::InvalidParameter(format!(
            "kinetic entropy needs lambda > |c| (lambda = {lambda}, c = {c})"
        )));
    }
    Ok(lambda / (lambda - c) * f1 * f1 + lambda / (lambda + c) * f2 * f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn printed_fluxes() {
        let sw = ConservationLaw::shallow_water(1.0).unwrap();
        assert_eq!(sw.flux(&[1.0, 0.0], 0).unwrap(), vec![0.0, 0.5]);
        let eu = ConservationLaw::isothermal_euler(1.0).unwrap();
        assert_eq!(eu.flux(&[1.0, 0.0], 0).unwrap(), vec![0.0, 1.0]);
        let tr = ConservationLaw::transport_2d(1.0, 0.0).unwrap();
        assert_eq!(tr.flux(&[3.0], 0).unwrap(), vec![3.0]);
        assert_eq!(tr.flux(&[3.0], 1).unwrap(), vec![0.0]);
    }

    #[test]
    fn inadmissible_states_are_rejected() {
        let sw = ConservationLaw::shallow_water(9.81).unwrap();
        assert!(matches!(sw.flux(&[0.0, 1.0], 0), Err(VlbmError::Domain(_))));
        assert!(matches!(
            sw.entropy_variables(&[-1.0, 0.0]),
            Err(VlbmError::Domain(_))
        ));
        let eu = ConservationLaw::isothermal_euler(1.0).unwrap();
        assert!(matches!(eu.entropy(&[0.0, 0.0]), Err(VlbmError::Domain(_))));
        assert!(matches!(
            sw.flux(&[1.0, 0.0], 1),
            Err(VlbmError::InvalidParameter(_))
        ));
        assert!(ConservationLaw::shallow_water(0.0).is_err());
        assert!(ConservationLaw::isothermal_euler(-1.0).is_err());
    }

    #[test]
    fn entropy_variable_examples() {
        let sw = ConservationLaw::shallow_water(9.81).unwrap();
        let ws = sw.entropy_variables(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(ws[0], 9.81);
        assert_eq!(ws[1], 0.0);
        let eu = ConservationLaw::isothermal_euler(1.0).unwrap();
        assert_eq!(eu.entropy_variables(&[1.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let tr = ConservationLaw::transport_1d(0.3).unwrap();
        assert_eq!(tr.entropy_variables(&[2.5]).unwrap(), vec![2.5]);
    }

    #[test]
    fn dual_entropy_examples() {
        let tr = ConservationLaw::transport_1d(0.5).unwrap();
        let [s1, s2] = tr.dual_kinetic_entropies(1.0, &[2.0]).unwrap();
        assert_relative_eq!(s1, 0.5);
        assert_relative_eq!(s2, 1.5);

        let eu = ConservationLaw::isothermal_euler(1.0).unwrap();
        let [s1, s2] = eu.dual_kinetic_entropies(2.0, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(s1, 0.5);
        assert_relative_eq!(s2, 0.5);

        let t2 = ConservationLaw::transport_2d(1.0, 0.0).unwrap();
        assert!(matches!(
            t2.dual_kinetic_entropies(1.0, &[1.0]),
            Err(VlbmError::Unsupported(_))
        ));
    }

    #[test]
    fn dual_entropies_sum_to_legendre_transform() {
        // s*(W*) = W* . W - s(W)
        for law in [
            ConservationLaw::shallow_water(2.0).unwrap(),
            ConservationLaw::isothermal_euler(1.3).unwrap(),
            ConservationLaw::transport_1d(-0.4).unwrap(),
        ] {
            let w: Vec<f64> = if law.m() == 1 {
                vec![0.7]
            } else {
                vec![1.4, -0.6]
            };
            let ws = law.entropy_variables(&w).unwrap();
            let legendre: f64 =
                ws.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - law.entropy(&w).unwrap();
            let [s1, s2] = law.dual_kinetic_entropies(3.0, &ws).unwrap();
            assert_relative_eq!(s1 + s2, legendre, max_relative = 1e-12);
        }
    }

    #[test]
    fn subcharacteristic_examples() {
        let tr = ConservationLaw::transport_1d(0.5).unwrap();
        assert!(tr.subcharacteristic_ok(1.0, &[1.0]).unwrap());
        let sw = ConservationLaw::shallow_water(1.0).unwrap();
        assert!(sw.subcharacteristic_ok(2.0, &[1.0, 0.0]).unwrap());
        // Strict inequality: boundary reports false.
        assert!(!sw.subcharacteristic_ok(1.0, &[1.0, 0.0]).unwrap());
        let eu = ConservationLaw::isothermal_euler(1.0).unwrap();
        assert!(!eu.subcharacteristic_ok(1.2, &[1.0, 0.5]).unwrap());
    }

    #[test]
    fn dual_hessian_examples() {
        let sw = ConservationLaw::shallow_water(1.0).unwrap();
        assert!(sw.dual_hessian_pd(2.0, &[1.0, 0.0]).unwrap());
        assert!(!sw.dual_hessian_pd(0.9, &[1.0, 0.0]).unwrap());
        assert!(matches!(
            sw.dual_hessian_pd(2.0, &[0.0, 0.0]),
            Err(VlbmError::Domain(_))
        ));
    }

    #[test]
    fn microscopic_entropy_examples() {
        assert_eq!(
            microscopic_entropy_transport(0.3, 1.0, 1.0, 0.0).unwrap(),
            0.5
        );
        assert_eq!(
            microscopic_entropy_transport(0.0, 1.0, 0.0, 1.0).unwrap(),
            0.5
        );
        let a = microscopic_entropy_transport(0.7, 1.1, 0.4, 0.9).unwrap();
        let b = microscopic_entropy_transport(0.7, 1.1, 0.4, -0.9).unwrap();
        assert_eq!(a, b);
        assert!(microscopic_entropy_transport(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn kinetic_and_moment_entropies_agree() {
        let (c, lambda) = (0.35, 1.2);
        let (f1, f2) = (0.2, 0.9);
        let w = f1 + f2;
        let y = -lambda * f1 + lambda * f2 - c * w;
        assert_relative_eq!(
            kinetic_entropy_transport(c, lambda, f1, f2).unwrap(),
            microscopic_entropy_transport(c, lambda, w, y).unwrap(),
            max_relative = 1e-14
        );
    }
}
