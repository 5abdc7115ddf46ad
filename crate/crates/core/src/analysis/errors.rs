//! Error norms and convergence rates.

use crate::error::{check_len, Result, VlbmError};

/// `sqrt(sum (a - b)^2 / sum a^2)`, with `a` as the reference.
pub fn l2_relative_error(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    let den: f64 = a.iter().map(|x| x * x).sum();
    if den == 0.0 || !den.is_finite() {
        return Err(VlbmError::UndefinedError);
    }
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((num / den).sqrt())
}

/// Least-squares slope of `log(error)` against `log(dt)`.
pub fn convergence_order(dts: &[f64], errors: &[f64]) -> Result<f64> {
    check_len(dts.len(), errors.len())?;
    if dts.len() < 3 {
        return Err(VlbmError::InvalidParameter(format!(
            "need at least 3 points for a convergence order, got {}",
            dts.len()
        )));
    }
    if dts
        .iter()
        .chain(errors)
        .any(|x| !(x.is_finite() && *x > 0.0))
    {
        return Err(VlbmError::Domain(
            "time steps and errors must be positive".into(),
        ));
    }
    let xs: Vec<f64> = dts.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|x| x.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(VlbmError::InvalidParameter(
            "time steps must not all be equal".into(),
        ));
    }
    Ok(sxy / sxx)
}
