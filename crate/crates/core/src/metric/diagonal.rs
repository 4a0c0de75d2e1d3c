//! Diagonal metrics `diag(m₀, d, …, d, m_N)` with `d = 1`.

use crate::error::{Error, Result};
use crate::lattice::EndpointModel;
use crate::matrix::{re, CMatrix};

use super::dieudonne_residual;

const RATIO_TOL: f64 = 1e-12;

/// Consistent value of all ratios `num/den`, or `Err(())` when they
/// disagree or a zero denominator meets a nonzero numerator.
fn common_ratio(pairs: impl Iterator<Item = (f64, f64)>) -> std::result::Result<Option<f64>, ()> {
    let mut value: Option<f64> = None;
    for (num, den) in pairs {
        if den == 0.0 {
            if num != 0.0 {
                return Err(());
            }
            continue;
        }
        let r = num / den;
        match value {
            None => value = Some(r),
            Some(v) if (v - r).abs() <= RATIO_TOL * v.abs().max(1.0) => {}
            Some(_) => return Err(()),
        }
    }
    Ok(value)
}

/// `(m₀, 1, m_N)` such that `diag(m₀, 1, …, 1, m_N)` solves `HᵀΘ = ΘH`
/// with both ends positive, or `None` when no such metric exists.
pub fn diagonal_metric(model: &EndpointModel) -> Result<Option<(f64, f64, f64)>> {
    if !model.is_real() {
        return Err(Error::UnsupportedModel(
            "diagonal metrics need a real model".into(),
        ));
    }
    let h = model.hamiltonian();
    let n = model.n();
    // M_0j = 0 gives H_j0 = m₀ H_0j; M_jN = 0 gives H_Nj m_N = H_jN
    let m0 = common_ratio((1..n).map(|j| (h[(j, 0)].re, h[(0, j)].re)));
    let mn = common_ratio((1..n).map(|j| (h[(j, n)].re, h[(n, j)].re)));
    let (m0, mn) = match (m0, mn) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Ok(None),
    };
    let (m0, mn) = match (m0, mn) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, 1.0 / a),
        (None, Some(b)) => (1.0 / b, b),
        (None, None) => (1.0, 1.0),
    };
    if !(m0 > 0.0 && mn > 0.0) || !m0.is_finite() || !mn.is_finite() {
        return Ok(None);
    }
    if (m0 * mn - 1.0).abs() > RATIO_TOL * (m0 * mn).max(1.0) {
        return Ok(None);
    }
    let theta = diagonal_theta(n + 1, m0, mn);
    let tol = RATIO_TOL * h.frobenius_norm().max(1.0) * m0.max(mn).max(1.0);
    if dieudonne_residual(&h, &theta)? > tol {
        return Ok(None);
    }
    Ok(Some((m0, 1.0, mn)))
}

/// `Θ = diag(m₀, 1, …, 1, m_N)` from [`diagonal_metric`].
pub fn diagonal_metric_theta(model: &EndpointModel) -> Result<Option<CMatrix>> {
    Ok(diagonal_metric(model)?.map(|(m0, _, mn)| diagonal_theta(model.dim(), m0, mn)))
}

pub(crate) fn diagonal_theta(dim: usize, m0: f64, mn: f64) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            re(0.0)
        } else if i == 0 {
            re(m0)
        } else if i == dim - 1 {
            re(mn)
        } else {
            re(1.0)
        }
    })
}
