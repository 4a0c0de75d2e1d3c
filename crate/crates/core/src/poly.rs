//! Univariate polynomial helpers. Coefficients are stored in ascending
//! order: `coeffs[k]` multiplies `x^k`.

use num_complex::Complex64;

use crate::matrix::{ONE, ZERO};

pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &a| acc * x + a)
}

pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * k as f64)
        .collect()
}

pub fn mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots
        .iter()
        .fold(vec![ONE], |acc, &r| mul(&acc, &[-r, ONE]))
}

/// Taylor shift: coefficients of `p(x + s)`.
pub fn shift(coeffs: &[Complex64], s: Complex64) -> Vec<Complex64> {
    // Horner-style synthetic expansion
    let mut out = vec![ZERO; coeffs.len()];
    for &a in coeffs.iter().rev() {
        // out = out * (x + s) + a
        let mut next = vec![ZERO; coeffs.len()];
        for k in 0..coeffs.len() {
            if out[k] == ZERO {
                continue;
            }
            next[k] += out[k] * s;
            if k + 1 < coeffs.len() {
                next[k + 1] += out[k];
            }
        }
        next[0] += a;
        out = next;
    }
    out
}

/// All complex roots by simultaneous Aberth–Ehrlich iteration.
///
/// Used as an oracle independent of the QR eigenvalue engine.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = coeffs.to_vec();
    while p.len() > 1 && p.last() == Some(&ZERO) {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let monic: Vec<Complex64> = p.iter().map(|a| a / lead).collect();
    let dp = derivative(&monic);

    // Cauchy bound for the initial circle
    let radius = 1.0 + monic[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let pv = eval(&monic, z[i]);
            if pv == ZERO {
                continue;
            }
            let ratio = pv / eval(&dp, z[i]);
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn roots_of_cubic() {
        let p = from_roots(&[c(1.0, 0.0), c(-2.0, 0.5), c(3.0, -1.0)]);
        let mut r = roots(&p);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(-2.0, 0.5)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((r[2] - c(3.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn shift_matches_substitution() {
        let p = vec![c(1.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let q = shift(&p, c(2.0, 0.0));
        for x in [-1.0, 0.0, 0.7, 2.5] {
            let lhs = eval(&q, c(x, 0.0));
            let rhs = eval(&p, c(x + 2.0, 0.0));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
