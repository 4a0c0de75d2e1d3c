use num_complex::Complex64;

use crate::eigen::eigenpairs;
use crate::error::{Error, Result};
use crate::matrix::{outer, re, CMatrix};

use super::MetricCertificate;

/// Unit eigenvectors of `H†`, one per eigenvalue.
pub fn conjugate_eigenvectors(h: &CMatrix) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    h.square_dim("Hamiltonian")?;
    let ep = eigenpairs(&h.adjoint())?;
    if let Some(d) = ep.deficient.first() {
        return Err(Error::Deficient {
            eigenvalue: d.eigenvalue.conj(),
            algebraic: d.algebraic_multiplicity,
            geometric: d.geometric_multiplicity,
        });
    }
    Ok(ep.pairs)
}

/// `Θ = Σ κ_n² |n⟩⟩⟨⟨n|` over the unit eigenvectors of `H†`.
pub fn metric_spectral(h: &CMatrix, kappa: &[f64]) -> Result<MetricCertificate> {
    let n = h.square_dim("Hamiltonian")?;
    if kappa.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need {n} weights, got {}",
            kappa.len()
        )));
    }
    if let Some(k) = kappa.iter().position(|&k| k == 0.0 || !k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "weight {k} must be finite and nonzero"
        )));
    }
    let kets = conjugate_eigenvectors(h)?;
    let mut theta = CMatrix::zeros(n, n);
    for ((_, ket), &k) in kets.iter().zip(kappa) {
        theta = &theta + &outer(ket, ket, re(k * k));
    }
    MetricCertificate::new(h, theta)
}

pub fn metric_spectral_unit(h: &CMatrix) -> Result<MetricCertificate> {
    metric_spectral(h, &vec![1.0; h.rows()])
}
