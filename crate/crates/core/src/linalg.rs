//! Small dense matrix utilities: Sylvester minors, symmetry defects and
//! complex eigen-pairs of the tiny mode matrices used by the analysis.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Determinant by cofactor expansion. Only meant for the `n <= 4` matrices
/// of this crate; a row of exact zeros yields an exact zero.
pub fn det_cofactor(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant of a non-square matrix");
    match n {
        0 => 1.0,
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        _ => {
            let mut det = 0.0;
            for col in 0..n {
                let pivot = a[(0, col)];
                if pivot == 0.0 {
                    continue;
                }
                let minor = a.clone().remove_row(0).remove_column(col);
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * pivot * det_cofactor(&minor);
            }
            det
        }
    }
}

/// Leading principal minors `|P_1|, ..., |P_n|`.
pub fn leading_principal_minors(p: &DMatrix<f64>) -> Vec<f64> {
    (1..=p.nrows())
        .map(|k| det_cofactor(&p.view((0, 0), (k, k)).into_owned()))
        .collect()
}

/// Sylvester test: every leading principal minor strictly exceeds
/// `relative_margin * max|p_ij|^k`. A zero margin is the plain strict test.
pub fn is_positive_definite(p: &DMatrix<f64>, relative_margin: f64) -> bool {
    let scale = p.amax();
    leading_principal_minors(p)
        .iter()
        .enumerate()
        .all(|(k, minor)| *minor > relative_margin * scale.powi(k as i32 + 1))
}

/// Induced infinity norm (maximum absolute row sum).
pub fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `||A - A^T||_inf`.
pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    norm_inf(&(a - a.transpose()))
}

/// Both eigenvalues of a complex 2x2 matrix via the quadratic formula.
pub fn eigenvalues_2x2(m: &DMatrix<Complex64>) -> [Complex64; 2] {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr - 4.0 * det).sqrt();
    // Pick the larger-modulus root first to avoid cancellation.
    let q = if (tr.conj() * disc).re >= 0.0 {
        -0.5 * (tr + disc)
    } else {
        -0.5 * (tr - disc)
    };
    let root1 = -q;
    let root2 = if q.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        -det / q
    };
    [root1, root2]
}

/// Eigenvalues of a small complex matrix. Uses the closed form for 2x2 and
/// a complex Schur decomposition otherwise.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    if m.nrows() == 2 {
        return eigenvalues_2x2(m).to_vec();
    }
    let schur = nalgebra::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Null vector of `m - gamma I`, scaled so its first component is `first`.
/// Returns `None` when the first component of the null vector vanishes.
pub fn kernel_vector(
    m: &DMatrix<Complex64>,
    gamma: Complex64,
    first: f64,
) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let shifted = m - DMatrix::<Complex64>::identity(n, n) * gamma;
    let v: Vec<Complex64> = if n == 2 {
        // Use the row with the larger entries for conditioning.
        let r0 = shifted[(0, 0)].norm() + shifted[(0, 1)].norm();
        let r1 = shifted[(1, 0)].norm() + shifted[(1, 1)].norm();
        let (p, q) = if r0 >= r1 {
            (shifted[(0, 0)], shifted[(0, 1)])
        } else {
            (shifted[(1, 0)], shifted[(1, 1)])
        };
        // p x + q y = 0
        if q.norm() > 0.0 {
            vec![q, -p]
        } else {
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        }
    } else {
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let (idx, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc },
                );
        v_t.row(idx).iter().map(|z| z.conj()).collect()
    };
    let lead = v[0];
    let size = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if lead.norm() <= 1e-14 * size {
        return None;
    }
    Some(v.iter().map(|z| z / lead * first).collect())
}
