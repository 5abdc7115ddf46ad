use nalgebra::DMatrix;
use proptest::prelude::*;
use vlbm_core::lattice::{ModelKind, VelocitySet};
use vlbm_core::models::ConservationLaw;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// (law, velocity set, admissible state) triples covering every pairing.
fn case() -> impl Strategy<Value = (ConservationLaw, VelocitySet, Vec<f64>)> {
    let lam = 0.1f64..10.0;
    prop_oneof![
        (lam.clone(), -3.0f64..3.0, -5.0f64..5.0).prop_map(|(l, v, w)| (
            ConservationLaw::transport_1d(v).unwrap(),
            VelocitySet::new(ModelKind::D1Q2, l, 1).unwrap(),
            vec![w]
        )),
        (lam.clone(), 0.1f64..20.0, 0.01f64..5.0, -3.0f64..3.0).prop_map(|(l, g, h, u)| (
            ConservationLaw::shallow_water(g).unwrap(),
            VelocitySet::new(ModelKind::D1Q2, l, 2).unwrap(),
            vec![h, h * u]
        )),
        (lam.clone(), 0.1f64..3.0, 0.01f64..5.0, -3.0f64..3.0).prop_map(|(l, c, rho, u)| (
            ConservationLaw::isothermal_euler(c).unwrap(),
            VelocitySet::new(ModelKind::D1Q2, l, 2).unwrap(),
            vec![rho, rho * u]
        )),
        (lam.clone(), -3.0f64..3.0, -3.0f64..3.0, -5.0f64..5.0).prop_map(|(l, a, b, w)| (
            ConservationLaw::transport_2d(a, b).unwrap(),
            VelocitySet::new(ModelKind::D2Q3, l, 1).unwrap(),
            vec![w]
        )),
        (lam, -3.0f64..3.0, -3.0f64..3.0, -5.0f64..5.0).prop_map(|(l, a, b, w)| (
            ConservationLaw::transport_2d(a, b).unwrap(),
            VelocitySet::new(ModelKind::D2Q4, l, 1).unwrap(),
            vec![w]
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn equilibria_are_consistent((law, vs, w) in case()) {
        let feq = vs.equilibrium(&law, &w).unwrap();
        let m = vs.m();
        for c in 0..m {
            let sum: f64 = (0..vs.n_velocities()).map(|k| feq[k * m + c]).sum();
            prop_assert!(rel_close(sum, w[c], 1e-12), "sum {sum} vs {}", w[c]);
        }
        for i in 0..vs.dim() {
            let q = law.flux(&w, i).unwrap();
            for c in 0..m {
                let moment: f64 = (0..vs.n_velocities()).map(|k| vs.velocity(k)[i] * feq[k * m + c]).sum();
                prop_assert!(rel_close(moment, q[c], 1e-12), "moment {moment} vs {}", q[c]);
            }
        }
    }

    #[test]
    fn beta_rows_annihilate_equilibria((law, vs, w) in case()) {
        let feq = vs.equilibrium(&law, &w).unwrap();
        let m = vs.m();
        let scale = vs.lambda().powi(2) * feq.iter().map(|f| f.abs()).fold(1.0, f64::max);
        for beta in vs.beta_rows() {
            for c in 0..m {
                let z: f64 = beta.iter().enumerate().map(|(k, b)| b * feq[k * m + c]).sum();
                prop_assert!(z.abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn equilibrium_maps_to_pure_conserved_moments((law, vs, w) in case()) {
        let feq = vs.equilibrium(&law, &w).unwrap();
        let y = vs.f_to_y(&law, &feq).unwrap();
        let scale = vs.lambda() * feq.iter().map(|f| f.abs()).fold(1.0, f64::max);
        for c in 0..vs.m() {
            prop_assert!(rel_close(y[c], w[c], 1e-12));
        }
        for v in &y[vs.m()..] {
            prop_assert!(v.abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn change_of_variables_round_trips(
        (law, vs, w) in case(),
        noise in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        // Perturb the equilibrium without changing W so that W stays admissible.
        let mut f = vs.equilibrium(&law, &w).unwrap();
        let m = vs.m();
        let nv = vs.n_velocities();
        for k in 0..nv - 1 {
            for c in 0..m {
                let d = noise[(k * m + c) % noise.len()];
                f[k * m + c] += d;
                f[(nv - 1) * m + c] -= d;
            }
        }
        let y = vs.f_to_y(&law, &f).unwrap();
        let back = vs.y_to_f(&law, &y).unwrap();
        let scale = f.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (a, b) in f.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale * vs.lambda().max(1.0 / vs.lambda()));
        }
        let y2 = vs.f_to_y(&law, &back).unwrap();
        let yscale = y.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (a, b) in y.iter().zip(&y2) {
            prop_assert!((a - b).abs() <= 1e-12 * yscale);
        }
        let wsum: f64 = (0..nv).map(|k| f[k * m]).sum();
        prop_assert_eq!(y[0], wsum);
    }

    #[test]
    fn moment_matrix_is_well_inverted(lambda in 0.1f64..10.0, m in 1usize..3) {
        for kind in [ModelKind::D1Q2, ModelKind::D2Q3, ModelKind::D2Q4] {
            let vs = VelocitySet::new(kind, lambda, m).unwrap();
            let ms = vs.moments();
            let n = vs.len();
            let defect = &ms.matrix * &ms.inverse - DMatrix::<f64>::identity(n, n);
            let norm = defect.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
            prop_assert!(norm < 1e-12, "{kind} lambda {lambda}: {norm}");
            // First block row sums the kinetic vectors.
            for c in 0..m {
                for k in 0..vs.n_velocities() {
                    prop_assert_eq!(ms.matrix[(c, k * m + c)], 1.0);
                }
            }
        }
    }
}

#[test]
fn velocities_scale_exactly_with_lambda() {
    for kind in [ModelKind::D1Q2, ModelKind::D2Q3, ModelKind::D2Q4] {
        let unit = VelocitySet::new(kind, 1.0, 1).unwrap();
        let scaled = VelocitySet::new(kind, 3.7, 1).unwrap();
        for k in 0..unit.n_velocities() {
            for i in 0..2 {
                assert_eq!(scaled.velocity(k)[i], 3.7 * unit.velocity(k)[i]);
            }
        }
    }
}
