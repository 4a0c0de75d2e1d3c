//! Metric operators `Θ` solving `H†Θ = ΘH`, their construction and
//! certification.

mod closed_form;
mod diagonal;
mod family;
mod nullspace;
mod spectral;

pub use closed_form::{chi_vector, chi_vector_at, closed_form_kets, closed_form_metric};
pub use diagonal::{diagonal_metric, diagonal_metric_theta};
pub use family::{
    hc_metric_family, recurrent_metric_family, recurrent_metric_family_seeded, LinearForm,
    MetricFamily, HC_NAMES, HC_SEEDS, PIVOT_TOL,
};
pub use nullspace::{span_residual, sylvester_nullspace};
pub use spectral::{conjugate_eigenvectors, metric_spectral, metric_spectral_unit};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::matrix::CMatrix;

/// Default tolerance for the three-way positivity classification.
pub const CLASSIFICATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    PositiveDefinite,
    Indefinite,
    Singular,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::PositiveDefinite => "positive-definite",
            Classification::Indefinite => "indefinite",
            Classification::Singular => "singular",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(eigenvalues: &[f64], tol: f64) -> Classification {
    if eigenvalues.iter().any(|e| e.abs() <= tol) {
        Classification::Singular
    } else if eigenvalues.iter().all(|&e| e > 0.0) {
        Classification::PositiveDefinite
    } else {
        Classification::Indefinite
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Positivity {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub classification: Classification,
}

/// Spectrum and classification of a Hermitian `Θ`.
pub fn positivity(theta: &CMatrix, tol: f64) -> Result<Positivity> {
    theta.square_dim("metric")?;
    let scale = theta.frobenius_norm().max(1.0);
    if !theta.is_hermitian(1e-12 * scale) {
        return Err(Error::InvalidInput(
            "metric candidate is not Hermitian".into(),
        ));
    }
    let eigenvalues = hermitian_eigenvalues(theta);
    Ok(Positivity {
        min_eigenvalue: eigenvalues[0],
        classification: classify(&eigenvalues, tol),
        eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricCertificate {
    pub theta: CMatrix,
    pub dieudonne_residual: f64,
    pub min_eigenvalue: f64,
    pub classification: Classification,
}

impl MetricCertificate {
    pub fn new(h: &CMatrix, theta: CMatrix) -> Result<Self> {
        let dieudonne_residual = dieudonne_residual(h, &theta)?;
        let p = positivity(&theta, CLASSIFICATION_TOL)?;
        Ok(Self {
            theta,
            dieudonne_residual,
            min_eigenvalue: p.min_eigenvalue,
            classification: p.classification,
        })
    }
}

/// Frobenius norm of `H†Θ - ΘH`.
pub fn dieudonne_residual(h: &CMatrix, theta: &CMatrix) -> Result<f64> {
    observable_check(h, theta)
}

/// Frobenius norm of `Λ†Θ - ΘΛ`.
pub fn observable_check(lambda_op: &CMatrix, theta: &CMatrix) -> Result<f64> {
    lambda_op.square_dim("operator")?;
    lambda_op.same_shape(theta)?;
    Ok((&(&lambda_op.adjoint() * theta) - &(theta * lambda_op)).frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_kinetic, build_parity, hc};
    use crate::matrix::{c, re};

    fn hc_diag(r: f64) -> CMatrix {
        let s = 1.0 - r;
        CMatrix::from_diagonal(&[re(1.0), re(s), re(s), re(s), re(s * s)])
    }

    #[test]
    fn residual_cases() {
        let t = build_kinetic(5).unwrap();
        assert_eq!(dieudonne_residual(&t, &CMatrix::identity(5)).unwrap(), 0.0);
        for r in [-1.0, 0.3, 0.9] {
            assert!(dieudonne_residual(&hc(r), &hc_diag(r)).unwrap() <= 1e-12);
        }
        assert!(dieudonne_residual(&hc(0.5), &CMatrix::identity(5)).unwrap() > 0.1);
        assert!(dieudonne_residual(&t, &CMatrix::identity(4)).is_err());
    }

    #[test]
    fn positivity_cases() {
        let p = positivity(&CMatrix::identity(3), 1e-10).unwrap();
        assert_eq!(p.min_eigenvalue, 1.0);
        assert_eq!(p.classification, Classification::PositiveDefinite);

        let p = positivity(&hc_diag(0.5), 1e-10).unwrap();
        assert!((p.min_eigenvalue - 0.25).abs() < 1e-15);
        assert_eq!(
            positivity(&hc_diag(1.2), 1e-10).unwrap().classification,
            Classification::Indefinite
        );
        assert_eq!(
            positivity(&hc_diag(1.0), 1e-10).unwrap().classification,
            Classification::Singular
        );
        let skew =
            CMatrix::from_vec(2, 2, vec![re(1.0), c(0.0, 1.0), c(0.0, 1.0), re(1.0)]).unwrap();
        assert!(matches!(
            positivity(&skew, 1e-10),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn observable_cases() {
        let d = CMatrix::from_diagonal(&[re(1.0), re(-2.0), re(0.5)]);
        let theta = CMatrix::from_diagonal(&[re(3.0), re(1.0), re(2.0)]);
        assert_eq!(observable_check(&d, &theta).unwrap(), 0.0);
        let p = build_parity(4).unwrap();
        assert_eq!(observable_check(&p, &CMatrix::identity(4)).unwrap(), 0.0);
        let h = hc(0.4);
        assert_eq!(
            observable_check(&h, &hc_diag(0.4)).unwrap(),
            dieudonne_residual(&h, &hc_diag(0.4)).unwrap()
        );
    }
}
