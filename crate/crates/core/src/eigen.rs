//! Spectra, eigenvectors, characteristic polynomials and defectiveness of
//! small dense complex matrices.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{nullspace, qr_eigenvalues};
use crate::matrix::{vec_norm, CMatrix, ONE, ZERO};

/// Eigenvalues closer than this are treated as one cluster when counting
/// multiplicities.
pub const CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub realness: Vec<bool>,
    pub all_real: bool,
    pub complex_pair_count: usize,
}

impl SpectrumReport {
    pub fn from_eigenvalues(
        mut eigenvalues: Vec<Complex64>,
        is_real: impl Fn(Complex64) -> bool,
    ) -> Self {
        sort_spectrum(&mut eigenvalues);
        let realness: Vec<bool> = eigenvalues.iter().map(|&e| is_real(e)).collect();
        let n_complex = realness.iter().filter(|r| !**r).count();
        Self {
            all_real: n_complex == 0,
            complex_pair_count: n_complex / 2,
            realness,
            eigenvalues,
        }
    }

    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.realness)
            .filter(|(_, r)| **r)
            .map(|(e, _)| e.re)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectReport {
    pub eigenvalue: Complex64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
}

impl DefectReport {
    pub fn is_defective(&self) -> bool {
        self.geometric_multiplicity < self.algebraic_multiplicity
    }
}

pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(spectral_order);
}

/// All eigenvalues with a realness flag `|Im λ| <= tol`.
pub fn eigenvalues(m: &CMatrix, tol: f64) -> Result<SpectrumReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let ev = qr_eigenvalues(m)?;
    Ok(SpectrumReport::from_eigenvalues(ev, |e| e.im.abs() <= tol))
}

/// Groups sorted eigenvalues into clusters whose members lie within `tol`
/// of some other member.
pub fn cluster(eigs: &[Complex64], tol: f64) -> Vec<Vec<Complex64>> {
    let mut remaining: Vec<Complex64> = eigs.to_vec();
    sort_spectrum(&mut remaining);
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    while let Some(seed) = remaining.first().copied() {
        remaining.remove(0);
        let mut group = vec![seed];
        let mut grew = true;
        while grew {
            grew = false;
            let mut k = 0;
            while k < remaining.len() {
                if group.iter().any(|g| (g - remaining[k]).norm() <= tol) {
                    group.push(remaining.remove(k));
                    grew = true;
                } else {
                    k += 1;
                }
            }
        }
        clusters.push(group);
    }
    clusters
}

fn mean(v: &[Complex64]) -> Complex64 {
    v.iter().sum::<Complex64>() / v.len() as f64
}

fn rank_tol(m: &CMatrix, tol: f64) -> f64 {
    tol * m.frobenius_norm().max(1.0)
}

/// Result of [`eigenpairs`]: one unit vector per independent eigendirection
/// plus a report for every cluster that lacks a full set.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub pairs: Vec<(Complex64, Vec<Complex64>)>,
    pub deficient: Vec<DefectReport>,
}

impl Eigenpairs {
    pub fn is_complete(&self) -> bool {
        self.deficient.is_empty()
    }
}

/// Eigenvalues and unit eigenvectors, with eigenvectors taken from the
/// numerical nullspace of `M - λI` for each eigenvalue cluster.
pub fn eigenpairs(m: &CMatrix) -> Result<Eigenpairs> {
    eigenpairs_with_tol(m, CLUSTER_TOL)
}

pub fn eigenpairs_with_tol(m: &CMatrix, tol: f64) -> Result<Eigenpairs> {
    let n = m.square_dim("eigenpair input")?;
    let ev = qr_eigenvalues(m)?;
    let mut pairs = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for group in cluster(&ev, tol) {
        let lambda = mean(&group);
        let shifted = m.shifted(lambda);
        let dec = crate::linalg::svd(&shifted);
        let thresh = rank_tol(m, tol);
        let k = group.len();
        // always keep at least the best vector; at most the cluster size
        let mut vecs: Vec<Vec<Complex64>> = dec
            .singular_values
            .iter()
            .zip(&dec.v)
            .rev()
            .enumerate()
            .filter(|(i, (s, _))| *i == 0 || **s <= thresh)
            .map(|(_, (_, v))| v.clone())
            .take(k)
            .collect();
        vecs.reverse();
        if vecs.len() < k {
            deficient.push(DefectReport {
                eigenvalue: lambda,
                algebraic_multiplicity: k,
                geometric_multiplicity: vecs.len(),
            });
        }
        for v in vecs {
            let norm = vec_norm(&v);
            pairs.push((lambda, v.iter().map(|z| z / norm).collect()));
        }
    }
    Ok(Eigenpairs { pairs, deficient })
}

/// Monic `det(λI - M)` by floating-point Faddeev–LeVerrier; ascending
/// coefficients. Real matrices can go through [`crate::exact`] instead.
pub fn characteristic_polynomial(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.square_dim("characteristic polynomial input")?;
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    let mut mk = CMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &CMatrix::identity(n).scale(coeffs[n - k + 1]);
        coeffs[n - k] = -(m * &mk).trace() / k as f64;
    }
    Ok(coeffs)
}

/// Algebraic multiplicity by clustering the computed spectrum around
/// `lambda`, geometric multiplicity as the nullity of `M - λI`, both at
/// `tol`.
pub fn defectiveness_at(m: &CMatrix, lambda: Complex64, tol: f64) -> Result<DefectReport> {
    let n = m.square_dim("defectiveness input")?;
    let ev = qr_eigenvalues(m)?;
    let nearest = ev
        .iter()
        .map(|e| (e - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    if nearest > tol {
        return Err(Error::NotAnEigenvalue {
            lambda,
            distance: nearest,
        });
    }
    let group = cluster(&ev, tol)
        .into_iter()
        .find(|g| g.iter().any(|e| (e - lambda).norm() <= tol))
        .expect("nearest eigenvalue lies in some cluster");
    let algebraic = group.len();
    let ns = nullspace(&m.shifted(lambda), rank_tol(m, tol));
    let geometric = ns.len().clamp(1, algebraic.min(n));
    Ok(DefectReport {
        eigenvalue: lambda,
        algebraic_multiplicity: algebraic,
        geometric_multiplicity: geometric,
    })
}
