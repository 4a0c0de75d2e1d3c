//! Real symmetric solutions of `H†Θ = ΘH` from the nullspace of the
//! vectorized constraint.

use crate::linalg::svd;
use crate::matrix::{inner, re, CMatrix};

const NULL_TOL: f64 = 1e-9;

/// Frobenius-orthonormal symmetric basis `E_ii`, `(E_ij + E_ji)/√2`.
fn symmetric_basis(n: usize) -> Vec<CMatrix> {
    let w = 0.5f64.sqrt();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut m = CMatrix::zeros(n, n);
            if i == j {
                m[(i, i)] = re(1.0);
            } else {
                m[(i, j)] = re(w);
                m[(j, i)] = re(w);
            }
            out.push(m);
        }
    }
    out
}

/// Frobenius-orthonormal basis of all real symmetric `Θ` with
/// `‖H†Θ - ΘH‖` numerically zero.
pub fn sylvester_nullspace(h: &CMatrix) -> Vec<CMatrix> {
    let n = h.rows();
    let basis = symmetric_basis(n);
    let hd = h.adjoint();
    // one real column per basis element: real and imaginary parts stacked
    let rows = 2 * n * n;
    let mut a = CMatrix::zeros(rows, basis.len());
    for (col, e) in basis.iter().enumerate() {
        let m = &(&hd * e) - &(e * h);
        for (k, z) in m.as_slice().iter().enumerate() {
            a[(k, col)] = re(z.re);
            a[(n * n + k, col)] = re(z.im);
        }
    }
    let dec = svd(&a);
    let tol = NULL_TOL * h.frobenius_norm().max(1.0);
    dec.singular_values
        .iter()
        .zip(&dec.v)
        .filter(|(s, _)| **s <= tol)
        .map(|(_, v)| {
            let mut m = CMatrix::zeros(n, n);
            for (c, e) in v.iter().zip(&basis) {
                m = &m + &e.scale(re(c.re));
            }
            m
        })
        .collect()
}

fn frob(a: &CMatrix, b: &CMatrix) -> f64 {
    inner(a.as_slice(), b.as_slice()).re
}

/// Largest Frobenius distance from a unit-normalized member of `a` to the
/// span of `b`.
pub fn span_residual(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    let mut ortho: Vec<CMatrix> = Vec::new();
    for m in b {
        let mut v = m.clone();
        for q in &ortho {
            v = &v - &q.scale(re(frob(q, &v)));
        }
        let norm = v.frobenius_norm();
        if norm > 1e-12 * m.frobenius_norm().max(1e-300) {
            ortho.push(v.scale(re(1.0 / norm)));
        }
    }
    a.iter()
        .map(|m| {
            let norm = m.frobenius_norm();
            if norm == 0.0 {
                return 0.0;
            }
            let mut v = m.scale(re(1.0 / norm));
            for q in &ortho {
                v = &v - &q.scale(re(frob(q, &v)));
            }
            v.frobenius_norm()
        })
        .fold(0.0, f64::max)
}
