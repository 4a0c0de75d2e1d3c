//! Finite lattice Hamiltonians with nonlocal PT-symmetric endpoint
//! interactions.
//!
//! The general model on `N+1` sites is the discrete Laplacian plus an
//! interaction supported on the first and last rows and columns:
//!
//! ```text
//! [ 2-z       β*_{N-1}-1  β*_{N-2} … β*_1       b     ]
//! [ α_1-1     2           -1                    β_1   ]
//! [ α_2       -1          2        …            β_2   ]
//! [ …                              …            …     ]
//! [ α_{N-1}                        -1  2    β_{N-1}-1 ]
//! [ a         α*_{N-1}    …   α*_1-1        2-z*      ]
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{c, re, CMatrix, ONE, ZERO};

/// Dynamical parameters of one endpoint-interaction Hamiltonian.
///
/// `alpha[k]` holds `α_{k+1}` and `beta[k]` holds `β_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointModel {
    n: usize,
    pub z: Complex64,
    pub a: f64,
    pub b: f64,
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

fn check_finite(field: &'static str, zs: &[Complex64]) -> Result<()> {
    match zs
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        None => Ok(()),
        Some(k) => Err(Error::InvalidModel {
            field,
            reason: format!("non-finite value at index {k}"),
        }),
    }
}

impl EndpointModel {
    pub fn new(
        n: usize,
        z: Complex64,
        a: f64,
        b: f64,
        alpha: Vec<Complex64>,
        beta: Vec<Complex64>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModel {
                field: "n",
                reason: format!("need n >= 2, got {n}"),
            });
        }
        for (field, v) in [("alpha", &alpha), ("beta", &beta)] {
            if v.len() != n - 1 {
                return Err(Error::InvalidModel {
                    field,
                    reason: format!("expected length {}, got {}", n - 1, v.len()),
                });
            }
        }
        check_finite("z", &[z])?;
        check_finite("a", &[re(a)])?;
        check_finite("b", &[re(b)])?;
        check_finite("alpha", &alpha)?;
        check_finite("beta", &beta)?;
        Ok(Self {
            n,
            z,
            a,
            b,
            alpha,
            beta,
        })
    }

    /// The single-parameter model with only the `z` endpoint potential.
    pub fn robin(n: usize, z: Complex64) -> Result<Self> {
        Self::new(
            n,
            z,
            0.0,
            0.0,
            vec![ZERO; n.saturating_sub(1)],
            vec![ZERO; n.saturating_sub(1)],
        )
    }

    /// All couplings zero: the Hamiltonian is the discrete Laplacian.
    pub fn free(n: usize) -> Result<Self> {
        Self::robin(n, ZERO)
    }

    /// Largest site index `N`; the matrix dimension is `N + 1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    /// True when `z`, `a`, `b` and every `α`, `β` are real.
    pub fn is_real(&self) -> bool {
        self.z.im == 0.0
            && self.alpha.iter().all(|x| x.im == 0.0)
            && self.beta.iter().all(|x| x.im == 0.0)
    }

    pub fn beta_is_zero(&self) -> bool {
        self.beta.iter().all(|x| *x == ZERO)
    }

    /// Multiplies every coupling by `r`, giving the family `T + r·V`.
    pub fn scaled(&self, r: f64) -> Self {
        Self {
            n: self.n,
            z: self.z * r,
            a: self.a * r,
            b: self.b * r,
            alpha: self.alpha.iter().map(|x| x * r).collect(),
            beta: self.beta.iter().map(|x| x * r).collect(),
        }
    }

    pub fn hamiltonian(&self) -> CMatrix {
        build_endpoint_hamiltonian(self)
    }
}

/// Discrete Laplacian: 2 on the diagonal, -1 on both off-diagonals.
pub fn build_kinetic(dim: usize) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(
            "kinetic matrix needs dim >= 1".into(),
        ));
    }
    Ok(kinetic(dim))
}

pub(crate) fn kinetic(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| match i.abs_diff(j) {
        0 => re(2.0),
        1 => re(-1.0),
        _ => ZERO,
    })
}

/// Antidiagonal parity matrix.
pub fn build_parity(dim: usize) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(
            "parity matrix needs dim >= 1".into(),
        ));
    }
    Ok(parity(dim))
}

pub(crate) fn parity(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| if i + j + 1 == dim { ONE } else { ZERO })
}

pub fn build_endpoint_hamiltonian(model: &EndpointModel) -> CMatrix {
    let n = model.n;
    let mut h = kinetic(n + 1);
    h[(0, 0)] = re(2.0) - model.z;
    h[(n, n)] = re(2.0) - model.z.conj();
    h[(0, n)] = re(model.b);
    h[(n, 0)] = re(model.a);
    for k in 1..n {
        // column 0 and row N carry α; row 0 and column N carry β
        h[(k, 0)] += model.alpha[k - 1];
        h[(n, k)] += model.alpha[n - k - 1].conj();
        h[(k, n)] += model.beta[k - 1];
        h[(0, k)] += model.beta[n - k - 1].conj();
    }
    h
}

/// General interaction matrix supported on the boundary rows and columns.
///
/// `b_col` and `d_col` are the full first and last columns (`N+1` entries);
/// `a_row` and `c_row` are the interior parts of the first and last rows
/// (`N-1` entries), which enter conjugated.
pub fn build_interaction(
    b_col: &[Complex64],
    d_col: &[Complex64],
    a_row: &[Complex64],
    c_row: &[Complex64],
) -> Result<CMatrix> {
    let dim = b_col.len();
    if dim < 2 {
        return Err(Error::InvalidModel {
            field: "b_col",
            reason: format!("need at least 2 entries, got {dim}"),
        });
    }
    let inner = dim - 2;
    for (field, v, want) in [
        ("d_col", d_col, dim),
        ("a_row", a_row, inner),
        ("c_row", c_row, inner),
    ] {
        if v.len() != want {
            return Err(Error::InvalidModel {
                field,
                reason: format!("expected length {want}, got {}", v.len()),
            });
        }
    }
    let last = dim - 1;
    let mut v = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        v[(i, 0)] = b_col[i];
        v[(i, last)] = d_col[i];
    }
    for k in 0..inner {
        v[(0, k + 1)] = a_row[k].conj();
        v[(last, k + 1)] = c_row[k].conj();
    }
    Ok(v)
}

/// Binary coupling index `ρ = σ + iτ`, stored by subscript: `sigma[m]`
/// is `σ_m`. `tau[0]` does not enter any matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryIndex {
    sigma: Vec<bool>,
    tau: Vec<bool>,
}

impl BinaryIndex {
    pub fn new(sigma: Vec<bool>, tau: Vec<bool>) -> Result<Self> {
        if sigma.len() < 2 || sigma.len() != tau.len() {
            return Err(Error::InvalidModel {
                field: "rho",
                reason: format!("sigma/tau lengths {} and {}", sigma.len(), tau.len()),
            });
        }
        Ok(Self { sigma, tau })
    }

    /// Parses digit strings written highest subscript first, e.g.
    /// `("00001", "00000")` for `σ_0 = 1`.
    pub fn from_digits(sigma: &str, tau: &str) -> Result<Self> {
        let parse = |s: &str| -> Result<Vec<bool>> {
            s.chars()
                .rev()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::InvalidModel {
                        field: "rho",
                        reason: format!("'{other}' is not a binary digit"),
                    }),
                })
                .collect()
        };
        Self::new(parse(sigma)?, parse(tau)?)
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self, m: usize) -> bool {
        self.sigma[m]
    }

    pub fn tau(&self, m: usize) -> bool {
        self.tau[m]
    }
}

/// Single-coupling potential: first row `(σ_{d-1}-iτ_{d-1}, …, σ_1-iτ_1, σ_0)`
/// and last column rows `1..d` equal to `σ_k+iτ_k`.
pub fn build_rho_potential(rho: &BinaryIndex) -> CMatrix {
    let d = rho.dim();
    let bit = |b: bool| if b { 1.0 } else { 0.0 };
    let mut v = CMatrix::zeros(d, d);
    for j in 0..d - 1 {
        let m = d - 1 - j;
        v[(0, j)] = c(bit(rho.sigma(m)), -bit(rho.tau(m)));
    }
    v[(0, d - 1)] = re(bit(rho.sigma(0)));
    for k in 1..d {
        v[(k, d - 1)] += c(bit(rho.sigma(k)), bit(rho.tau(k)));
    }
    v
}

/// The same coupling expressed as an endpoint model at unit strength.
pub fn rho_model(rho: &BinaryIndex) -> EndpointModel {
    let d = rho.dim();
    let n = d - 1;
    let bit = |b: bool| if b { 1.0 } else { 0.0 };
    let beta = (1..n)
        .map(|k| c(bit(rho.sigma(k)), bit(rho.tau(k))))
        .collect();
    EndpointModel {
        n,
        z: -c(bit(rho.sigma(n)), -bit(rho.tau(n))),
        a: 0.0,
        b: bit(rho.sigma(0)),
        alpha: vec![ZERO; n - 1],
        beta,
    }
}

/// Robin parameter map `z = 1 / (1 - ξ - iζ)`.
pub fn robin_to_z(xi: f64, zeta: f64) -> Result<Complex64> {
    let den = c(1.0 - xi, -zeta);
    if den == ZERO {
        return Err(Error::SingularParameter(format!(
            "z(ξ, ζ) has a pole at ξ = 1, ζ = 0 (got ξ = {xi}, ζ = {zeta})"
        )));
    }
    Ok(den.inv())
}

/// Frobenius norm of `H†P - PH`; zero for PT-symmetric matrices.
pub fn check_pt_symmetry(h: &CMatrix) -> Result<f64> {
    let dim = h.square_dim("Hamiltonian")?;
    let p = parity(dim);
    Ok((&(&h.adjoint() * &p) - &(&p * h)).frobenius_norm())
}

/// Named model families used by the CLI and the tests. Each preset is a
/// unit-strength [`EndpointModel`]; the family at coupling `R` is
/// `model.scaled(R)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    /// Robin endpoints only, `z = iR`, on `n+1` sites.
    UKa8 { n: usize },
    /// `T + R·V(ρ_c)`, the five-site model with a factorized secular equation.
    Hc,
    /// Seven-site non-tridiagonal toy model.
    H7,
    /// `T + R·V(ρ)` for an arbitrary binary index.
    Rho(BinaryIndex),
    /// Zero coupling at every `R`.
    Laplacian { n: usize },
}

impl Preset {
    /// Looks up a preset by name. Accepts `uKa8`, `hc`, `h7`, `rho`
    /// (alias of `rho_a`), `rho_a`, `rho_b`, `rho_c`, `rho:<σ digits>:<τ digits>`
    /// and `laplacian`. `n` sizes the presets that have no fixed dimension.
    pub fn from_name(name: &str, n: usize) -> Option<Preset> {
        let rho = |s: &str| BinaryIndex::from_digits(s, "00000").ok().map(Preset::Rho);
        match name {
            "uKa8" | "uka8" => Some(Preset::UKa8 { n }),
            "hc" => Some(Preset::Hc),
            "h7" => Some(Preset::H7),
            "rho" | "rho_a" => rho("00001"),
            "rho_b" => rho("11111"),
            "rho_c" => rho("11000"),
            "laplacian" | "free" => Some(Preset::Laplacian { n }),
            other => {
                let rest = other.strip_prefix("rho:")?;
                let (s, t) = rest.split_once(':').unwrap_or((rest, ""));
                let t = if t.is_empty() {
                    "0".repeat(s.len())
                } else {
                    t.to_string()
                };
                BinaryIndex::from_digits(s, &t).ok().map(Preset::Rho)
            }
        }
    }

    pub fn names() -> &'static [&'static str] {
        &[
            "uKa8",
            "hc",
            "h7",
            "rho",
            "rho_a",
            "rho_b",
            "rho_c",
            "laplacian",
        ]
    }

    pub fn unit_model(&self) -> EndpointModel {
        match self {
            Preset::UKa8 { n } => {
                EndpointModel::robin((*n).max(2), c(0.0, 1.0)).expect("n >= 2 is enforced")
            }
            Preset::Hc => {
                rho_model(&BinaryIndex::from_digits("11000", "00000").expect("valid digits"))
            }
            Preset::H7 => {
                let n = 6;
                let mut alpha = vec![ZERO; n - 1];
                alpha[0] = ONE;
                let mut beta = vec![ZERO; n - 1];
                beta[3] = ONE;
                beta[4] = ONE;
                EndpointModel::new(n, ONE, 0.0, 0.0, alpha, beta).expect("fixed dimensions")
            }
            Preset::Rho(rho) => rho_model(rho),
            Preset::Laplacian { n } => {
                EndpointModel::free((*n).max(2)).expect("n >= 2 is enforced")
            }
        }
    }

    pub fn model(&self, r: f64) -> EndpointModel {
        self.unit_model().scaled(r)
    }

    pub fn hamiltonian(&self, r: f64) -> CMatrix {
        self.model(r).hamiltonian()
    }
}

pub fn hc(r: f64) -> CMatrix {
    Preset::Hc.hamiltonian(r)
}

pub fn h7(r: f64) -> CMatrix {
    Preset::H7.hamiltonian(r)
}
