//! Exact rational matrices and characteristic polynomials.
//!
//! Every finite `f64` is a dyadic rational, so real matrices convert
//! without loss; rational couplings such as `R = 1/3` are built directly
//! through [`family_matrix`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{kinetic, Preset};
use crate::matrix::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    dim: usize,
    data: Vec<BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl QMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![BigRational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = BigRational::one();
        }
        m
    }

    /// Exact conversion of a real square matrix. Fails on nonzero
    /// imaginary parts.
    pub fn from_real(m: &CMatrix) -> Result<Self> {
        let dim = m.square_dim("rational conversion input")?;
        let mut data = Vec::with_capacity(dim * dim);
        for z in m.as_slice() {
            if z.im != 0.0 {
                return Err(Error::InvalidInput("exact path needs a real matrix".into()));
            }
            data.push(
                BigRational::from_float(z.re)
                    .ok_or_else(|| Error::InvalidInput("non-finite entry".into()))?,
            );
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.dim, other.dim);
        QMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> QMatrix {
        QMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn shifted(&self, s: &BigRational) -> QMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            let v = out.get(i, i) - s;
            out.set(i, i, v);
        }
        out
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> BigRational {
        (0..self.dim).fold(BigRational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |i, j| {
            crate::matrix::re(self.get(i, j).to_f64().unwrap_or(f64::NAN))
        })
    }
}

/// Monic characteristic polynomial `det(λI - M)` by Faddeev–LeVerrier in
/// exact arithmetic; ascending coefficients.
pub fn characteristic_polynomial(m: &QMatrix) -> Vec<BigRational> {
    let n = m.dim();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = QMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        mk = m
            .mul(&mk)
            .add(&QMatrix::identity(n).scale(&coeffs[n - k + 1]));
        let am = m.mul(&mk);
        coeffs[n - k] = -am.trace() / int(k as i64);
    }
    coeffs
}

/// `T + r·W` for a preset whose unit-strength coupling `W` is real.
pub fn family_matrix(preset: &Preset, r: &BigRational) -> Result<QMatrix> {
    let unit = preset.unit_model().hamiltonian();
    let t = kinetic(unit.rows());
    let w = QMatrix::from_real(&(&unit - &t))?;
    Ok(QMatrix::from_real(&t)?.add(&w.scale(r)))
}

pub fn poly_mul(p: &[BigRational], q: &[BigRational]) -> Vec<BigRational> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(Zero::is_zero)
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let b = trim(b.to_vec());
    let lead = b[b.len() - 1].clone();
    let mut r = trim(a.to_vec());
    while r.len() >= b.len() && !is_zero_poly(&r) {
        let shift = r.len() - b.len();
        let f = r[r.len() - 1].clone() / &lead;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &f * bk;
        }
        r.pop();
        if r.is_empty() {
            r.push(BigRational::zero());
        }
        r = trim(r);
    }
    r
}

fn poly_derivative(p: &[BigRational]) -> Vec<BigRational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * int(k as i64))
        .collect()
}

fn sign_at_infinity(p: &[BigRational], positive: bool) -> i32 {
    let p = trim(p.to_vec());
    let deg = p.len() - 1;
    let lead = &p[deg];
    if lead.is_zero() {
        return 0;
    }
    let mut s = if lead.is_positive() { 1 } else { -1 };
    if !positive && deg % 2 == 1 {
        s = -s;
    }
    s
}

/// Number of distinct real roots of `p` by a Sturm sequence.
pub fn distinct_real_roots(p: &[BigRational]) -> usize {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    let mut seq = vec![p.clone(), trim(poly_derivative(&p))];
    loop {
        let n = seq.len();
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let changes = |positive: bool| {
        let signs: Vec<i32> = seq
            .iter()
            .map(|q| sign_at_infinity(q, positive))
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(false) - changes(true)
}

/// Greatest common divisor of two polynomials, made monic.
pub fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !is_zero_poly(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.last().cloned().unwrap_or_else(BigRational::one);
    x.into_iter().map(|c| c / &lead).collect()
}

/// True when every root of `p` is real, counted through the Sturm
/// sequence of its square-free part.
pub fn all_roots_real(p: &[BigRational]) -> bool {
    let p = trim(p.to_vec());
    let g = poly_gcd(&p, &poly_derivative(&p));
    // square-free part p / gcd(p, p')
    let sq = poly_div_exact(&p, &g);
    distinct_real_roots(&sq) == sq.len() - 1
}

fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() - 1 < db {
        return vec![BigRational::zero()];
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let f = r[k + db].clone() / &b[db];
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &f * bj;
        }
        q[k] = f;
    }
    trim(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_kinetic;

    #[test]
    fn laplacian_two_sites() {
        let t = QMatrix::from_real(&build_kinetic(2).unwrap()).unwrap();
        assert_eq!(characteristic_polynomial(&t), vec![int(3), int(-4), int(1)]);
    }

    #[test]
    fn sturm_counts() {
        // (x-1)(x-2)(x^2+1)
        let p = poly_mul(
            &poly_mul(&[int(-1), int(1)], &[int(-2), int(1)]),
            &[int(1), int(0), int(1)],
        );
        assert_eq!(distinct_real_roots(&p), 2);
        assert!(!all_roots_real(&p));
        // (x-1)^2 (x+3)
        let q = poly_mul(
            &poly_mul(&[int(-1), int(1)], &[int(-1), int(1)]),
            &[int(3), int(1)],
        );
        assert_eq!(distinct_real_roots(&q), 2);
        assert!(all_roots_real(&q));
    }

    #[test]
    fn rational_family_matches_float_family() {
        let r = rational(1, 2);
        let q = family_matrix(&Preset::Hc, &r).unwrap();
        assert_eq!(q.to_cmatrix(), crate::lattice::hc(0.5));
    }
}
