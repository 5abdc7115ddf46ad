//! DdQq velocity sets, moment matrices and equilibria.
//!
//! A velocity set carries `n_v` kinetic velocities `V_k = lambda * V~_k`.
//! Kinetic data are stacked as `F = (F_1, ..., F_{n_v})` with each `F_k`
//! holding `m` components, so `F[k * m + c]` is component `c` of `F_k`.
//!
//! The moment vector `Y = M F - C M F^eq(W)` is ordered by scalar moment
//! row and then by component: `Y[r * m + c]`. Row 0 is the conserved
//! vector `W`, rows `1..=d` are the flux errors `y^i = sum_k V_k^i F_k -
//! Q^i(W)`, and D2Q4 has one extra row `z = sum_k beta_k F_k` with
//! `beta = lambda^2 (1, 1, -1, -1)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{check_len, Result, VlbmError};
use crate::models::ConservationLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    D1Q2,
    D2Q3,
    D2Q4,
}

impl ModelKind {
    pub fn dim(self) -> usize {
        match self {
            Self::D1Q2 => 1,
            Self::D2Q3 | Self::D2Q4 => 2,
        }
    }

    pub fn n_velocities(self) -> usize {
        match self {
            Self::D1Q2 => 2,
            Self::D2Q3 => 3,
            Self::D2Q4 => 4,
        }
    }

    /// Number of supplementary moment rows, `n_v - d - 1`.
    pub fn n_supplementary(self) -> usize {
        self.n_velocities() - self.dim() - 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::D1Q2 => "D1Q2",
            Self::D2Q3 => "D2Q3",
            Self::D2Q4 => "D2Q4",
        }
    }

    /// Unit velocity pattern `V~_k`, padded with zeros to two components.
    fn directions(self) -> Vec<[f64; 2]> {
        let s3 = 3f64.sqrt() / 2.0;
        match self {
            Self::D1Q2 => vec![[-1.0, 0.0], [1.0, 0.0]],
            Self::D2Q3 => vec![[1.0, 0.0], [-0.5, s3], [-0.5, -s3]],
            Self::D2Q4 => vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = VlbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "D1Q2" => Ok(Self::D1Q2),
            "D2Q3" => Ok(Self::D2Q3),
            "D2Q4" => Ok(Self::D2Q4),
            other => Err(VlbmError::InvalidParameter(format!(
                "unknown model {other:?}"
            ))),
        }
    }
}

/// Block moment matrix `M`, its inverse and the flux-row selector `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentStructure {
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub selector: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySet {
    kind: ModelKind,
    lambda: f64,
    m: usize,
    velocities: Vec<[f64; 2]>,
    /// Scalar moment pattern, one row per moment, one column per velocity.
    pattern: Vec<Vec<f64>>,
    moments: MomentStructure,
}

impl VelocitySet {
    pub fn new(kind: ModelKind, lambda: f64, m: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(VlbmError::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if m == 0 {
            return Err(VlbmError::InvalidParameter("m must be at least 1".into()));
        }
        let velocities: Vec<[f64; 2]> = kind
            .directions()
            .into_iter()
            .map(|v| [lambda * v[0], lambda * v[1]])
            .collect();
        let nv = velocities.len();
        let mut pattern = vec![vec![1.0; nv]];
        for i in 0..kind.dim() {
            pattern.push(velocities.iter().map(|v| v[i]).collect());
        }
        if kind == ModelKind::D2Q4 {
            let l2 = lambda * lambda;
            pattern.push(vec![l2, l2, -l2, -l2]);
        }

        let n = nv * m;
        let mut matrix = DMatrix::zeros(n, n);
        for (r, row) in pattern.iter().enumerate() {
            for (k, &p) in row.iter().enumerate() {
                for c in 0..m {
                    matrix[(r * m + c, k * m + c)] = p;
                }
            }
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| VlbmError::InvalidParameter("moment matrix is singular".into()))?;
        let mut selector = DMatrix::zeros(n, n);
        for i in m..m * (1 + kind.dim()) {
            selector[(i, i)] = 1.0;
        }
        Ok(Self {
            kind,
            lambda,
            m,
            velocities,
            pattern,
            moments: MomentStructure {
                matrix,
                inverse,
                selector,
            },
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn n_velocities(&self) -> usize {
        self.velocities.len()
    }

    /// Length `m * n_v` of a stacked kinetic vector.
    pub fn len(&self) -> usize {
        self.m * self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Velocity `V_k`; the second component is zero for 1-d models.
    pub fn velocity(&self, k: usize) -> [f64; 2] {
        self.velocities[k]
    }

    pub fn velocities(&self) -> &[[f64; 2]] {
        &self.velocities
    }

    /// Supplementary rows `beta^l` (empty except for D2Q4).
    pub fn beta_rows(&self) -> &[Vec<f64>] {
        &self.pattern[1 + self.kind.dim()..]
    }

    pub fn moments(&self) -> &MomentStructure {
        &self.moments
    }

    /// Checks that `law` can be paired with this velocity set.
    pub fn check_law(&self, law: &ConservationLaw) -> Result<()> {
        if law.dim() != self.dim() {
            return Err(VlbmError::Unsupported(format!(
                "{} is a {}-d law, {} is a {}-d model",
                law.name(),
                law.dim(),
                self.kind,
                self.dim()
            )));
        }
        if law.m() != self.m {
            return Err(VlbmError::Unsupported(format!(
                "{} has {} components, velocity set built with m = {}",
                law.name(),
                law.m(),
                self.m
            )));
        }
        Ok(())
    }

    /// Equilibrium `F^eq(W)` as a stacked vector.
    pub fn equilibrium(&self, law: &ConservationLaw, w: &[f64]) -> Result<Vec<f64>> {
        self.check_law(law)?;
        let mut out = vec![0.0; self.len()];
        self.equilibrium_into(law, w, &mut out)?;
        Ok(out)
    }

    /// Allocation-free equilibrium; `law` must already be compatible.
    pub(crate) fn equilibrium_into(
        &self,
        law: &ConservationLaw,
        w: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        let m = self.m;
        let mut q = [[0.0f64; 2]; 2];
        for (i, qi) in q.iter_mut().enumerate().take(self.dim()) {
            law.flux_into(w, i, &mut qi[..m])?;
        }
        let l = self.lambda;
        match self.kind {
            ModelKind::D1Q2 => {
                for c in 0..m {
                    out[c] = 0.5 * w[c] - q[0][c] / (2.0 * l);
                    out[m + c] = 0.5 * w[c] + q[0][c] / (2.0 * l);
                }
            }
            ModelKind::D2Q3 => {
                let s = 2.0 / (3.0 * l * l);
                for (k, v) in self.velocities.iter().enumerate() {
                    for c in 0..m {
                        out[k * m + c] = w[c] / 3.0 + s * (v[0] * q[0][c] + v[1] * q[1][c]);
                    }
                }
            }
            ModelKind::D2Q4 => {
                for c in 0..m {
                    out[c] = 0.25 * w[c] + q[0][c] / (2.0 * l);
                    out[m + c] = 0.25 * w[c] - q[0][c] / (2.0 * l);
                    out[2 * m + c] = 0.25 * w[c] + q[1][c] / (2.0 * l);
                    out[3 * m + c] = 0.25 * w[c] - q[1][c] / (2.0 * l);
                }
            }
        }
        Ok(())
    }

    /// `Y = M F - C M F^eq(W)` with `W = sum_k F_k`.
    ///
    /// `C M F^eq(W)` is the exact flux `(0, Q^1(W), .., Q^d(W), 0)` by the
    /// consistency relations, so the flux rows are computed as `sum_k V_k^i
    /// F_k - Q^i(W)`.
    pub fn f_to_y(&self, law: &ConservationLaw, f: &[f64]) -> Result<Vec<f64>> {
        self.check_law(law)?;
        check_len(self.len(), f.len())?;
        let mut y = vec![0.0; self.len()];
        self.f_to_y_into(law, f, &mut y)?;
        Ok(y)
    }

    pub(crate) fn f_to_y_into(
        &self,
        law: &ConservationLaw,
        f: &[f64],
        y: &mut [f64],
    ) -> Result<()> {
        let m = self.m;
        for (r, row) in self.pattern.iter().enumerate() {
            for c in 0..m {
                y[r * m + c] = row.iter().enumerate().map(|(k, p)| p * f[k * m + c]).sum();
            }
        }
        let mut q = [0.0f64; 2];
        for i in 0..self.dim() {
            law.flux_into(&y[..m], i, &mut q[..m])?;
            for c in 0..m {
                y[(1 + i) * m + c] -= q[c];
            }
        }
        Ok(())
    }

    /// Inverse of [`Self::f_to_y`]: `F = M^{-1} (Y + C M F^eq(W(Y)))`.
    pub fn y_to_f(&self, law: &ConservationLaw, y: &[f64]) -> Result<Vec<f64>> {
        self.check_law(law)?;
        check_len(self.len(), y.len())?;
        let m = self.m;
        let mut moments = y.to_vec();
        let mut q = [0.0f64; 2];
        for i in 0..self.dim() {
            law.flux_into(&y[..m], i, &mut q[..m])?;
            for c in 0..m {
                moments[(1 + i) * m + c] += q[c];
            }
        }
        let inv = &self.moments.inverse;
        Ok((0..self.len())
            .map(|row| {
                (0..self.len())
                    .map(|col| inv[(row, col)] * moments[col])
                    .sum()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn printed_velocities() {
        let d1 = VelocitySet::new(ModelKind::D1Q2, 1.0, 1).unwrap();
        assert_eq!(d1.velocity(0)[0], -1.0);
        assert_eq!(d1.velocity(1)[0], 1.0);

        let d4 = VelocitySet::new(ModelKind::D2Q4, 2.0, 1).unwrap();
        assert_eq!(
            d4.velocities(),
            &[[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]]
        );

        let d3 = VelocitySet::new(ModelKind::D2Q3, 1.0, 1).unwrap();
        assert_eq!(d3.velocity(1)[0], -0.5);
        assert_relative_eq!(d3.velocity(1)[1], 3f64.sqrt() / 2.0);

        assert!(matches!(
            VelocitySet::new(ModelKind::D1Q2, 0.0, 1),
            Err(VlbmError::InvalidParameter(_))
        ));
        assert!(VelocitySet::new(ModelKind::D1Q2, -1.0, 1).is_err());
    }

    #[test]
    fn printed_moment_matrices() {
        let d1 = VelocitySet::new(ModelKind::D1Q2, 1.0, 1).unwrap();
        assert_eq!(
            d1.moments().matrix,
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0])
        );
        let prod = &d1.moments().matrix * &d1.moments().inverse;
        assert_relative_eq!(prod, DMatrix::identity(2, 2), epsilon = 1e-15);

        let d4 = VelocitySet::new(ModelKind::D2Q4, 1.0, 1).unwrap();
        let last: Vec<f64> = d4.moments().matrix.row(3).iter().copied().collect();
        assert_eq!(last, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(d4.beta_rows().len(), 1);
        assert_eq!(
            d4.moments().selector.diagonal().as_slice(),
            &[0.0, 1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn block_expansion_for_systems() {
        let vs = VelocitySet::new(ModelKind::D1Q2, 2.0, 2).unwrap();
        let mm = &vs.moments().matrix;
        assert_eq!(mm.nrows(), 4);
        // y-row of component 1 picks -lambda F_1[1] + lambda F_2[1].
        assert_eq!(
            mm.row(3).iter().copied().collect::<Vec<_>>(),
            vec![0.0, -2.0, 0.0, 2.0]
        );
        assert_eq!(
            vs.moments().selector.diagonal().as_slice(),
            &[0.0, 0.0, 1.0, 1.0]
        );
    }

    #[test]
    fn equilibrium_examples() {
        let law = ConservationLaw::transport_1d(0.5).unwrap();
        let vs = VelocitySet::new(ModelKind::D1Q2, 1.0, 1).unwrap();
        assert_eq!(vs.equilibrium(&law, &[1.0]).unwrap(), vec![0.25, 0.75]);

        let zero = ConservationLaw::transport_2d(0.0, 0.0).unwrap();
        let d4 = VelocitySet::new(ModelKind::D2Q4, 1.7, 1).unwrap();
        assert_eq!(d4.equilibrium(&zero, &[2.0]).unwrap(), vec![0.5; 4]);

        let d3 = VelocitySet::new(ModelKind::D2Q3, 1.0, 1).unwrap();
        for f in d3.equilibrium(&zero, &[1.0]).unwrap() {
            assert_relative_eq!(f, 1.0 / 3.0, epsilon = 1e-16);
        }

        let sw = ConservationLaw::shallow_water(1.0).unwrap();
        let d1 = VelocitySet::new(ModelKind::D1Q2, 2.0, 2).unwrap();
        assert!(matches!(
            d1.equilibrium(&sw, &[0.0, 1.0]),
            Err(VlbmError::Domain(_))
        ));
        assert!(matches!(
            d4.equilibrium(&sw, &[1.0, 0.0]),
            Err(VlbmError::Unsupported(_))
        ));
    }

    #[test]
    fn f_to_y_examples() {
        let law = ConservationLaw::transport_1d(0.0).unwrap();
        let vs = VelocitySet::new(ModelKind::D1Q2, 1.0, 1).unwrap();
        let y = vs.f_to_y(&law, &[0.2, 0.8]).unwrap();
        assert_relative_eq!(y[0], 1.0);
        assert_relative_eq!(y[1], 0.6, epsilon = 1e-15);
        let f = vs.y_to_f(&law, &[1.0, 0.6]).unwrap();
        assert_relative_eq!(f[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(f[1], 0.8, epsilon = 1e-15);

        let adv = ConservationLaw::transport_1d(0.3).unwrap();
        let feq = vs.equilibrium(&adv, &[1.7]).unwrap();
        let y = vs.f_to_y(&adv, &feq).unwrap();
        assert_eq!(y[0], 1.7);
        assert!(y[1].abs() < 1e-15);
    }
}
