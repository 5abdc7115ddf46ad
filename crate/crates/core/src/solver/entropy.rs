//! Entropy diagnostics for the D1Q2 transport scheme.

use crate::error::{Result, VlbmError};
use crate::models::microscopic_entropy_transport;
use crate::solver::field::KineticField;

/// `sum_cells sigma(W, y) dx` with `W = F_1 + F_2` and
/// `y = -lambda F_1 + lambda F_2 - c W`.
pub fn total_entropy_transport(field: &KineticField, c: f64, lambda: f64) -> Result<f64> {
    if field.n_velocities() != 2 || field.m() != 1 || field.grid().dim() != 1 {
        return Err(VlbmError::Unsupported(
            "transport entropy is defined for scalar D1Q2 fields".into(),
        ));
    }
    if !(lambda > c.abs()) {
        return Err(VlbmError::InvalidParameter(format!(
            "entropy needs lambda > |c| (lambda = {lambda}, c = {c})"
        )));
    }
    let (f1, f2) = (field.component(0, 0), field.component(1, 0));
    let mut total = 0.0;
    for (a, b) in f1.iter().zip(f2) {
        let w = a + b;
        let y = lambda * (b - a) - c * w;
        total += microscopic_entropy_transport(c, lambda, w, y)?;
    }
    Ok(total * field.grid().dx(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ModelKind, VelocitySet};
    use crate::models::ConservationLaw;
    use crate::solver::{relax_step, Grid};

    #[test]
    fn equilibrium_unit_state_has_half_entropy() {
        let grid = Grid::unit(1, 10).unwrap();
        let vs = VelocitySet::new(ModelKind::D1Q2, 2.0, 1).unwrap();
        let law = ConservationLaw::transport_1d(1.0).unwrap();
        let field = KineticField::from_equilibrium(&grid, &vs, &law, |_| vec![1.0]).unwrap();
        let s = total_entropy_transport(&field, 1.0, 2.0).unwrap();
        assert!((s - 0.5).abs() < 1e-14);
        assert!(total_entropy_transport(&field, 2.0, 2.0).is_err());
    }

    #[test]
    fn omega_two_relaxation_preserves_entropy() {
        let grid = Grid::unit(1, 12).unwrap();
        let vs = VelocitySet::new(ModelKind::D1Q2, 2.0, 1).unwrap();
        let law = ConservationLaw::transport_1d(1.0).unwrap();
        let mut field =
            KineticField::from_kinetic(&grid, &vs, |x| vec![(7.0 * x[0]).sin(), 0.2 + x[0] * x[0]])
                .unwrap();
        let before = total_entropy_transport(&field, 1.0, 2.0).unwrap();
        relax_step(&mut field, &law, &vs, 2.0).unwrap();
        let after = total_entropy_transport(&field, 1.0, 2.0).unwrap();
        assert!((before - after).abs() < 1e-14 * before.abs().max(1.0));
    }
}
