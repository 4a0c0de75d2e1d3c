//! In-repo dense kernels: balancing, Hessenberg reduction, shifted QR,
//! one-sided Jacobi SVD, symmetric Jacobi and LU.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ONE, ZERO};

/// Subdiagonal entries below this fraction of their diagonal neighbours are
/// deflated.
pub const DEFLATION_REL: f64 = f64::EPSILON;

/// Total QR sweeps allowed per unit of dimension.
pub const ITERATIONS_PER_DIM: usize = 100;

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Eigenvalues are unchanged.
pub fn balance(m: &mut CMatrix) {
    const RADIX: f64 = 2.0;
    let n = m.rows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                if j != i {
                    col += abs1(m[(j, i)]);
                    r += abs1(m[(i, j)]);
                }
            }
            if col == 0.0 || r == 0.0 {
                continue;
            }
            let s = col + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while col < g {
                f *= RADIX;
                col *= RADIX * RADIX;
            }
            g = r * RADIX;
            while col > g {
                f /= RADIX;
                col /= RADIX * RADIX;
            }
            if (col + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= inv;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
pub fn hessenberg(h: &mut CMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // left: (I - 2 v v^H) H on rows k+1..n
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * h[(k + 1 + t, j)])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= 2.0 * vt * dot;
            }
        }
        // right: H (I - 2 v v^H) on columns k+1..n
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| h[(i, k + 1 + t)] * vt)
                .sum();
            for (t, vt) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= 2.0 * dot * vt.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with
/// `G * [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let an = a.norm();
    let r = an.hypot(b.norm());
    (an / r, (a / an) * b.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * cc;
    let disc = (p * p + bc).sqrt();
    let den = if (p + disc).norm() >= (p - disc).norm() {
        p + disc
    } else {
        p - disc
    };
    if den == ZERO {
        d
    } else {
        d - bc / den
    }
}

/// Eigenvalues of a square matrix by balancing, Hessenberg reduction and
/// single-shift complex QR with Wilkinson shifts. Order is unspecified.
pub fn qr_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.square_dim("eigenvalue input")?;
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let cap = ITERATIONS_PER_DIM * n;

    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut its = 0usize;
    loop {
        if hi == 0 {
            eig.push(h[(0, 0)]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let mut s = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            if s == 0.0 {
                s = scale;
            }
            if abs1(h[(l, l - 1)]) <= DEFLATION_REL * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[(hi, hi)]);
            hi -= 1;
            its = 0;
            continue;
        }

        total += 1;
        its += 1;
        if total > cap {
            return Err(Error::NumericalFailure(format!(
                "QR iteration did not converge after {cap} sweeps; {} of {n} eigenvalues found, \
                 active block {l}..={hi}, last subdiagonal {:.3e}",
                eig.len(),
                h[(hi, hi - 1)].norm()
            )));
        }

        let mu = if its % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * cs + sn * b;
                h[(k + 1, j)] = -sn.conj() * a + b * cs;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = l + off;
            for i in l..=(k + 2).min(hi) {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * cs + b * sn.conj();
                h[(i, k + 1)] = -a * sn + b * cs;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(eig)
}

/// Thin singular value decomposition `A = U diag(s) V^H`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Columns of `A V`, normalized where the singular value is nonzero.
    pub u: Vec<Vec<Complex64>>,
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns.
    pub v: Vec<Vec<Complex64>>,
}

/// One-sided (Hestenes) Jacobi SVD. Singular values are returned in
/// decreasing order with matching vectors.
pub fn svd(a: &CMatrix) -> Svd {
    let n = a.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    const TOL: f64 = 1e-15;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g == 0.0 || g <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let rotate = |xs: &mut Vec<Vec<Complex64>>| {
                    for i in 0..xs[p].len() {
                        let xp = xs[p][i];
                        let xq = xs[q][i];
                        xs[p][i] = xp * cs - xq * phase.conj() * sn;
                        xs[q][i] = xp * phase * sn + xq * cs;
                    }
                };
                rotate(&mut cols);
                rotate(&mut v);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    Svd {
        u: order
            .iter()
            .map(|&j| {
                let s = norms[j];
                if s > 0.0 {
                    cols[j].iter().map(|z| z / s).collect()
                } else {
                    cols[j].clone()
                }
            })
            .collect(),
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: order.iter().map(|&j| v[j].clone()).collect(),
    }
}

/// Orthonormal basis of the numerical nullspace: right singular vectors
/// whose singular value is at most `abs_tol`.
pub fn nullspace(a: &CMatrix, abs_tol: f64) -> Vec<Vec<Complex64>> {
    let dec = svd(a);
    dec.singular_values
        .iter()
        .zip(dec.v)
        .filter(|(s, _)| **s <= abs_tol)
        .map(|(_, v)| v)
        .collect()
}

/// Eigenvalues of a real symmetric matrix (row-major `n×n`) by cyclic
/// Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[idx(i, j)] * m[idx(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| m[idx(i, i)] * m[idx(i, i)]).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = cs * akp - sn * akq;
                    m[idx(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = m[idx(p, k)];
                    let aqk = m[idx(q, k)];
                    m[idx(p, k)] = cs * apk - sn * aqk;
                    m[idx(q, k)] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending. Uses the real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`, whose spectrum doubles each
/// eigenvalue.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let big = 2 * n;
    let mut a = vec![0.0; big * big];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * big + j] = z.re;
            a[(i + n) * big + (j + n)] = z.re;
            a[i * big + (j + n)] = -z.im;
            a[(i + n) * big + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(&a, big);
    doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// LU factorization with partial pivoting, used for solves and
/// determinants.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.square_dim("LU input")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[(k, k)];
            if piv == ZERO {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn determinant(&self) -> Complex64 {
        (0..self.lu.rows()).fold(Complex64::new(self.sign, 0.0), |acc, i| {
            acc * self.lu[(i, i)]
        })
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                left: format!("{n}"),
                right: format!("{}", b.len()),
            });
        }
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                y[i] = y[i] - l * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                y[i] = y[i] - u * y[k];
            }
            let d = self.lu[(i, i)];
            if d == ZERO {
                return Err(Error::NumericalFailure(format!("singular pivot at {i}")));
            }
            y[i] /= d;
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.lu.rows();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<Complex64> = (0..n).map(|i| if i == j { ONE } else { ZERO }).collect();
            cols.push(self.solve(&e)?);
        }
        Ok(CMatrix::from_columns(&cols))
    }
}

pub fn determinant(a: &CMatrix) -> Result<Complex64> {
    Ok(Lu::new(a)?.determinant())
}
