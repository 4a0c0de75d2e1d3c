//! Closed-form kets of `H†` for models without `β` couplings.
//!
//! With `β = 0` and `b = 0`, rows `1..N` of `(H† - μ)k = 0` form a banded
//! triangular system for the first `N` components in terms of the last
//! one, `x`. Writing `2y = 2 - μ` and `t + 1/t = 2y`, its inverse is
//! `U(t)U(1/t)` and
//!
//! ```text
//! χ = U(t) U(1/t) (α_{N-1}, …, α_2, α_1 - 1, 2 - z - μ)ᵀ x
//! ```

use num_complex::Complex64;

use crate::boundary::{joukowski_root, triangular_u};
use crate::eigen::sort_spectrum;
use crate::error::{Error, Result};
use crate::lattice::EndpointModel;
use crate::linalg::qr_eigenvalues;
use crate::matrix::{normalized, outer, re, CMatrix, ONE};

use super::MetricCertificate;

fn check_supported(model: &EndpointModel) -> Result<()> {
    if !model.beta_is_zero() {
        return Err(Error::UnsupportedModel(
            "closed-form kets need beta = 0".into(),
        ));
    }
    if model.b != 0.0 {
        return Err(Error::UnsupportedModel(
            "closed-form kets need b = 0".into(),
        ));
    }
    Ok(())
}

/// The `(N+1)`-vector `(χ, x)` for the `H†` eigenvalue `mu`.
pub fn chi_vector_at(model: &EndpointModel, mu: Complex64, x: Complex64) -> Result<Vec<Complex64>> {
    check_supported(model)?;
    let n = model.n();
    let alpha = model.alpha();
    let mut src: Vec<Complex64> = (2..n).rev().map(|k| alpha[k - 1]).collect();
    src.push(alpha[0] - ONE);
    src.push(re(2.0) - model.z - mu);
    let y = (re(2.0) - mu) * 0.5;
    let t = joukowski_root(y);
    let inv = &triangular_u(t, n) * &triangular_u(t.inv(), n);
    let mut ket: Vec<Complex64> = inv.mul_vec(&src).into_iter().map(|v| v * x).collect();
    ket.push(x);
    Ok(ket)
}

fn conjugate_energies(model: &EndpointModel) -> Result<Vec<Complex64>> {
    let mut e = qr_eigenvalues(&model.hamiltonian().adjoint())?;
    sort_spectrum(&mut e);
    Ok(e)
}

/// Ket for the `n`-th eigenvalue of `H†` in spectral order, with `x = 1`.
pub fn chi_vector(model: &EndpointModel, n: usize) -> Result<Vec<Complex64>> {
    check_supported(model)?;
    let energies = conjugate_energies(model)?;
    let mu = *energies.get(n).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "state index {n} out of range 0..{}",
            energies.len()
        ))
    })?;
    chi_vector_at(model, mu, ONE)
}

/// Unit-normalized closed-form kets for every eigenvalue of `H†`.
pub fn closed_form_kets(model: &EndpointModel) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    check_supported(model)?;
    conjugate_energies(model)?
        .into_iter()
        .map(|mu| Ok((mu, normalized(&chi_vector_at(model, mu, ONE)?))))
        .collect()
}

/// `Σ κ_n² |χ_n⟩⟨χ_n|` with unit kets.
pub fn closed_form_metric(model: &EndpointModel, kappa: &[f64]) -> Result<MetricCertificate> {
    let kets = closed_form_kets(model)?;
    if kappa.len() != kets.len() {
        return Err(Error::InvalidParameter(format!(
            "need {} weights, got {}",
            kets.len(),
            kappa.len()
        )));
    }
    let dim = model.dim();
    let mut theta = CMatrix::zeros(dim, dim);
    for ((_, k), &w) in kets.iter().zip(kappa) {
        theta = &theta + &outer(k, k, re(w * w));
    }
    MetricCertificate::new(&model.hamiltonian(), theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, vec_norm, ZERO};
    use crate::metric::metric_spectral_unit;

    fn model() -> EndpointModel {
        EndpointModel::new(3, re(0.4), 0.2, 0.0, vec![ZERO, ZERO], vec![ZERO, ZERO]).unwrap()
    }

    fn residual(h: &CMatrix, mu: Complex64, k: &[Complex64]) -> f64 {
        let hd = h.adjoint();
        hd.mul_vec(k)
            .iter()
            .zip(k)
            .map(|(a, b)| (a - mu * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn kets_solve_conjugate_problem() {
        let m = model();
        let h = m.hamiltonian();
        for (mu, k) in closed_form_kets(&m).unwrap() {
            assert!(residual(&h, mu, &k) <= 1e-8, "mu = {mu}");
        }
    }

    #[test]
    fn linear_in_x() {
        let m = model();
        let mu = conjugate_energies(&m).unwrap()[1];
        let a = chi_vector_at(&m, mu, ONE).unwrap();
        let b = chi_vector_at(&m, mu, c(2.5, -1.0)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x * c(2.5, -1.0) - y).norm() <= 1e-14 * (1.0 + y.norm()));
        }
        assert_eq!(chi_vector(&m, 1).unwrap(), a);
        assert!(chi_vector(&m, 9).is_err());
    }

    #[test]
    fn agrees_with_spectral_metric() {
        let m = EndpointModel::new(
            4,
            re(0.3),
            -0.2,
            0.0,
            vec![re(0.1), re(-0.2), re(0.15)],
            vec![ZERO; 3],
        )
        .unwrap();
        let a = closed_form_metric(&m, &[1.0; 5]).unwrap();
        let b = metric_spectral_unit(&m.hamiltonian()).unwrap();
        assert!((&a.theta - &b.theta).max_abs() <= 1e-8);
        assert!(vec_norm(&chi_vector(&m, 0).unwrap()) > 0.0);
    }

    #[test]
    fn rejects_beta_and_b() {
        let beta = EndpointModel::new(3, ZERO, 0.0, 0.0, vec![ZERO; 2], vec![ONE, ZERO]).unwrap();
        assert!(matches!(
            chi_vector(&beta, 0),
            Err(Error::UnsupportedModel(_))
        ));
        let b = EndpointModel::new(3, ZERO, 0.0, 0.5, vec![ZERO; 2], vec![ZERO; 2]).unwrap();
        assert!(matches!(
            closed_form_kets(&b),
            Err(Error::UnsupportedModel(_))
        ));
    }
}
