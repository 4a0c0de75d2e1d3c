//! Boundary-layer reduction of the endpoint eigenproblem.
//!
//! The bulk block of every endpoint model is the Dirichlet Laplacian on
//! `N-1` sites, which is diagonalized in closed form by Chebyshev
//! polynomials of the second kind. Eliminating the bulk amplitudes
//! `|X> = Σ(E)(c₀x₋ + c_N x₊)` leaves a 2×2 secular system for the
//! endpoint amplitudes `(x₋, x₊)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::EndpointModel;
use crate::linalg::svd;
use crate::matrix::{re, vec_norm, CMatrix, ONE, ZERO};

/// Energies closer than this to a bulk eigenvalue are resolvent poles.
pub const POLE_TOL: f64 = 1e-10;
/// Scan points closer than this to a bulk eigenvalue are skipped.
pub const GRID_POLE_TOL: f64 = 1e-8;

/// `U_0(y), …, U_m(y)` by the three-term recurrence.
pub fn chebyshev_u(y: f64, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(1.0);
    if m >= 1 {
        out.push(2.0 * y);
    }
    for k in 2..=m {
        out.push(2.0 * y * out[k - 1] - out[k - 2]);
    }
    out
}

/// Zeros of `U_{m+1}`: `y_j = cos((j+1)π/(m+2))`, decreasing.
pub fn chebyshev_nodes(m: usize) -> Vec<f64> {
    (0..=m)
        // sin form keeps the nodes exactly antisymmetric, with an exact 0
        .map(|j| {
            let k = m as f64 - 2.0 * j as f64;
            (k * std::f64::consts::PI / (2.0 * (m + 2) as f64)).sin()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LaplacianEigenbasis {
    pub nodes: Vec<f64>,
    /// `δ_j = 2(1 - y_j)`, increasing.
    pub deltas: Vec<f64>,
    /// Orthogonal; column `j` is proportional to `(U_0(y_j), …, U_m(y_j))`.
    pub basis: CMatrix,
}

impl LaplacianEigenbasis {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// `U diag(δ) Uᵀ`, which should reproduce the Laplacian.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&self.deltas.iter().map(|&x| re(x)).collect::<Vec<_>>());
        &(&self.basis * &d) * &self.basis.transpose()
    }
}

/// Closed-form eigenbasis of the `(m+1)`-site Dirichlet Laplacian.
pub fn laplacian_eigenbasis(m: usize) -> LaplacianEigenbasis {
    let nodes = chebyshev_nodes(m);
    let deltas = nodes.iter().map(|y| 2.0 * (1.0 - y)).collect();
    let columns: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&y| {
            let u = chebyshev_u(y, m);
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            u.into_iter().map(|x| re(x / norm)).collect()
        })
        .collect();
    LaplacianEigenbasis {
        nodes,
        deltas,
        basis: CMatrix::from_columns(&columns),
    }
}

fn inner_basis(model: &EndpointModel) -> LaplacianEigenbasis {
    laplacian_eigenbasis(model.n() - 2)
}

fn resolvent_from(basis: &LaplacianEigenbasis, energy: Complex64) -> Result<CMatrix> {
    if let Some(&delta) = basis
        .deltas
        .iter()
        .find(|&&d| (energy - d).norm() <= POLE_TOL)
    {
        return Err(Error::ResolventPole { energy, delta });
    }
    let u = &basis.basis;
    let k = basis.dim();
    Ok(CMatrix::from_fn(k, k, |i, j| {
        (0..k)
            .map(|l| u[(i, l)] * u[(j, l)] / (energy - basis.deltas[l]))
            .sum()
    }))
}

/// `Σ(E) = (E - T_inner)⁻¹` on the `N-1` bulk sites, through the Chebyshev
/// eigenbasis.
pub fn inner_resolvent(energy: Complex64, model: &EndpointModel) -> Result<CMatrix> {
    resolvent_from(&inner_basis(model), energy)
}

/// Boundary rows and columns of `H`, split off from the bulk.
struct Blocks {
    h: CMatrix,
    n: usize,
    r0: Vec<Complex64>,
    rn: Vec<Complex64>,
    c0: Vec<Complex64>,
    cn: Vec<Complex64>,
}

impl Blocks {
    fn new(model: &EndpointModel) -> Self {
        let h = model.hamiltonian();
        let n = model.n();
        let r0 = (1..n).map(|k| h[(0, k)]).collect();
        let rn = (1..n).map(|k| h[(n, k)]).collect();
        let c0 = (1..n).map(|k| h[(k, 0)]).collect();
        let cn = (1..n).map(|k| h[(k, n)]).collect();
        Self {
            h,
            n,
            r0,
            rn,
            c0,
            cn,
        }
    }

    fn bilinear(row: &[Complex64], m: &CMatrix, col: &[Complex64]) -> Complex64 {
        let mc = m.mul_vec(col);
        row.iter().zip(&mc).map(|(a, b)| a * b).sum()
    }

    fn secular(&self, energy: Complex64, sigma: &CMatrix) -> CMatrix {
        let (h, n) = (&self.h, self.n);
        let f = |row: &[Complex64], col: &[Complex64]| Self::bilinear(row, sigma, col);
        CMatrix::from_vec(
            2,
            2,
            vec![
                h[(0, 0)] - energy + f(&self.r0, &self.c0),
                h[(0, n)] + f(&self.r0, &self.cn),
                h[(n, 0)] + f(&self.rn, &self.c0),
                h[(n, n)] - energy + f(&self.rn, &self.cn),
            ],
        )
        .expect("finite 2x2 block")
    }

    /// Bulk amplitudes for given endpoint amplitudes.
    fn inner_amplitudes(&self, sigma: &CMatrix, xm: Complex64, xp: Complex64) -> Vec<Complex64> {
        let src: Vec<Complex64> = self
            .c0
            .iter()
            .zip(&self.cn)
            .map(|(a, b)| a * xm + b * xp)
            .collect();
        sigma.mul_vec(&src)
    }
}

/// The 2×2 matrix acting on `(x₋, x₊)` after the bulk has been eliminated.
pub fn secular_matrix(energy: Complex64, model: &EndpointModel) -> Result<CMatrix> {
    let sigma = inner_resolvent(energy, model)?;
    Ok(Blocks::new(model).secular(energy, &sigma))
}

fn det2(s: &CMatrix) -> Complex64 {
    s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)]
}

pub fn secular_determinant(energy: Complex64, model: &EndpointModel) -> Result<Complex64> {
    Ok(det2(&secular_matrix(energy, model)?))
}

/// `d/dE det S(E)`, using `dΣ/dE = -Σ²`.
pub fn secular_determinant_derivative(
    energy: Complex64,
    model: &EndpointModel,
) -> Result<Complex64> {
    let sigma = inner_resolvent(energy, model)?;
    let blocks = Blocks::new(model);
    let s = blocks.secular(energy, &sigma);
    let sigma2 = &sigma * &sigma;
    let g = |row: &[Complex64], col: &[Complex64]| -Blocks::bilinear(row, &sigma2, col);
    let ds = [
        -ONE + g(&blocks.r0, &blocks.c0),
        g(&blocks.r0, &blocks.cn),
        g(&blocks.rn, &blocks.c0),
        -ONE + g(&blocks.rn, &blocks.cn),
    ];
    Ok(ds[0] * s[(1, 1)] + s[(0, 0)] * ds[3] - ds[1] * s[(1, 0)] - s[(0, 1)] * ds[2])
}

/// `det S(E) · Π(δ_k - E)`, which equals `det(H - E)` and has no poles.
fn cleared_determinant(blocks: &Blocks, basis: &LaplacianEigenbasis, energy: f64) -> Result<f64> {
    let e = re(energy);
    let sigma = resolvent_from(basis, e)?;
    let d = det2(&blocks.secular(e, &sigma));
    let clear: f64 = basis.deltas.iter().map(|&dk| dk - energy).product();
    Ok((d * clear).re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl ScanGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo < hi) || points < 2 {
            return Err(Error::InvalidParameter(format!(
                "scan grid needs lo < hi and at least 2 points, got ({lo}, {hi}, {points})"
            )));
        }
        Ok(Self { lo, hi, points })
    }

    /// Grid covering the Gershgorin disks of the model's Hamiltonian.
    pub fn covering(model: &EndpointModel, points: usize) -> Self {
        let h = model.hamiltonian();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..h.rows() {
            let radius: f64 = (0..h.cols())
                .filter(|&j| j != i)
                .map(|j| h[(i, j)].norm())
                .sum();
            lo = lo.min(h[(i, i)].re - radius);
            hi = hi.max(h[(i, i)].re + radius);
        }
        let pad = 1e-3 * (hi - lo).max(1.0);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            points: points.max(2),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.lo + step * k as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub energy: Complex64,
    /// `(x₋, x₊)`.
    pub boundary_values: (Complex64, Complex64),
    pub inner: Vec<Complex64>,
    /// `(x₋, inner…, x₊)`, unit length.
    pub full: Vec<Complex64>,
}

impl BoundState {
    pub fn residual(&self, h: &CMatrix) -> f64 {
        let hv = h.mul_vec(&self.full);
        hv.iter()
            .zip(&self.full)
            .map(|(a, b)| (a - self.energy * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Outcome of a scan: the accepted states and the grid points that were
/// skipped for lying on a bulk pole.
#[derive(Debug, Clone)]
pub struct BoundStateScan {
    pub states: Vec<BoundState>,
    pub skipped: Vec<f64>,
}

const RESIDUAL_TOL: f64 = 1e-8;

fn assemble(blocks: &Blocks, basis: &LaplacianEigenbasis, energy: f64) -> Option<BoundState> {
    let e = re(energy);
    let sigma = resolvent_from(basis, e).ok()?;
    let s = blocks.secular(e, &sigma);
    let dec = svd(&s);
    let x = dec.v.last()?;
    let (xm, xp) = (x[0], x[1]);
    let inner = blocks.inner_amplitudes(&sigma, xm, xp);
    let mut full = Vec::with_capacity(blocks.n + 1);
    full.push(xm);
    full.extend_from_slice(&inner);
    full.push(xp);
    let norm = vec_norm(&full);
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    let scale = ONE / norm;
    let full: Vec<Complex64> = full.iter().map(|v| v * scale).collect();
    let state = BoundState {
        energy: e,
        boundary_values: (xm * scale, xp * scale),
        inner: inner.iter().map(|v| v * scale).collect(),
        full,
    };
    let bound = RESIDUAL_TOL * (blocks.h.frobenius_norm() + energy.abs()).max(1.0);
    (state.residual(&blocks.h) <= bound).then_some(state)
}

fn bisect(f: &impl Fn(f64) -> Option<f64>, mut lo: f64, mut hi: f64, flo: f64, tol: f64) -> f64 {
    let slo = flo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match f(mid) {
            Some(v) if v == 0.0 => return mid,
            Some(v) if v.signum() == slo => lo = mid,
            Some(_) => hi = mid,
            // on a pole: nudge
            None => lo = mid + tol.min(0.25 * (hi - lo)),
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of `f` on `[lo, hi]`.
fn golden_min(f: &impl Fn(f64) -> Option<f64>, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let eval = |x: f64| f(x).unwrap_or(f64::INFINITY);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Real bound-state energies and wavefunctions found as zeros of the
/// secular determinant on `scan`. Candidates are bracketed by sign changes
/// of the pole-cleared determinant (and by its local extrema, which catch
/// close or tangent pairs), bisected to `tol`, and kept only when the
/// assembled vector solves the full eigenproblem.
pub fn bound_states(model: &EndpointModel, scan: &ScanGrid, tol: f64) -> Result<Vec<BoundState>> {
    Ok(bound_state_scan(model, scan, tol)?.states)
}

pub fn bound_state_scan(
    model: &EndpointModel,
    scan: &ScanGrid,
    tol: f64,
) -> Result<BoundStateScan> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    ScanGrid::new(scan.lo, scan.hi, scan.points)?;
    let blocks = Blocks::new(model);
    let basis = inner_basis(model);
    let f = |e: f64| cleared_determinant(&blocks, &basis, e).ok();

    let grid = scan.values();
    let near_pole = |e: f64| basis.deltas.iter().any(|d| (e - d).abs() <= GRID_POLE_TOL);
    let values: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&e| if near_pole(e) { None } else { f(e) })
        .collect();
    let skipped: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.is_none())
        .map(|(e, _)| *e)
        .collect();
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(&values)
        .filter_map(|(e, v)| v.map(|v| (*e, v)))
        .collect();

    let mut candidates = Vec::new();
    for w in pts.windows(2) {
        let ((e0, f0), (e1, f1)) = (w[0], w[1]);
        if f0 == 0.0 {
            candidates.push(e0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            candidates.push(bisect(&f, e0, e1, f0, tol));
        }
    }
    if let Some(&(e, v)) = pts.last() {
        if v == 0.0 {
            candidates.push(e);
        }
    }
    for w in pts.windows(3) {
        let ((e0, f0), (_, f1), (e2, f2)) = (w[0], w[1], w[2]);
        let s = f1.signum();
        if s == 0.0 || f0.signum() != s || f2.signum() != s {
            continue;
        }
        if (s * f1) < (s * f0) && (s * f1) <= (s * f2) {
            // minimize the signed value; a sign change inside means two roots
            let signed = |e: f64| f(e).map(|v| s * v);
            let (emin, vmin) = golden_min(&signed, e0, e2, tol);
            if vmin < 0.0 {
                let fl = s * f0;
                candidates.push(bisect(&signed, e0, emin, fl, tol));
                candidates.push(bisect(&signed, emin, e2, vmin, tol));
            } else {
                candidates.push(emin);
            }
        }
    }

    candidates.sort_by(f64::total_cmp);
    let mut states: Vec<BoundState> = candidates
        .par_iter()
        .filter_map(|&e| assemble(&blocks, &basis, e))
        .collect();
    let merge = (10.0 * tol).max(1e-9);
    states.dedup_by(|b, a| (b.energy - a.energy).norm() <= merge);
    Ok(BoundStateScan { states, skipped })
}

/// Upper-triangular `U(τ)` with `U_{ij} = τ^{j-i}` for `j >= i`.
pub fn triangular_u(tau: Complex64, dim: usize) -> CMatrix {
    let mut powers = vec![ONE; dim];
    for k in 1..dim {
        powers[k] = powers[k - 1] * tau;
    }
    CMatrix::from_fn(dim, dim, |i, j| if j >= i { powers[j - i] } else { ZERO })
}

/// `I - 2yJ + J²` with `J` the upper shift; its inverse is `U(t)U(1/t)`
/// whenever `t + 1/t = 2y`.
pub fn shift_operator(y: Complex64, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| match j.wrapping_sub(i) {
        0 => ONE,
        1 => -(y * 2.0),
        2 => ONE,
        _ => ZERO,
    })
}

/// Root `t` of `t + 1/t = 2y` with `|t| >= 1`.
pub fn joukowski_root(y: Complex64) -> Complex64 {
    let s = (y * y - ONE).sqrt();
    let (t1, t2) = (y + s, y - s);
    if t1.norm() >= t2.norm() {
        t1
    } else {
        t2
    }
}
