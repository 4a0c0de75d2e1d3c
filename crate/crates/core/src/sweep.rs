//! Parameter sweeps: reality domains and exceptional points of coupling
//! families, positivity domains of metric candidates, and conditioning of
//! pseudometric families.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::{eigenvalues, SpectrumReport};
use crate::error::{Error, Result};
use crate::exact::{all_roots_real, characteristic_polynomial, QMatrix};
use crate::lattice::{build_parity, h7};
use crate::linalg::hermitian_eigenvalues;
use crate::matrix::{re, CMatrix};
use crate::metric::{
    classify, hc_metric_family, positivity, recurrent_metric_family, Classification,
    CLASSIFICATION_TOL,
};

/// Relative realness threshold: `|Im E| <= REAL_REL · (1 + |E|)`.
pub const REAL_REL: f64 = 1e-8;
/// Points whose complex eigenvalues all lie within this relative distance
/// of the axis are re-checked exactly when the matrix is real.
const RECHECK_REL: f64 = 1e-5;

pub fn is_real_eigenvalue(e: Complex64) -> bool {
    e.im.abs() <= REAL_REL * (1.0 + e.norm())
}

/// Spectrum with the sweep realness rule. A real matrix flagged complex
/// only through near-axis pairs is re-checked with a Sturm count on its
/// exact characteristic polynomial.
pub fn classify_spectrum(h: &CMatrix) -> Result<SpectrumReport> {
    let raw = eigenvalues(h, f64::MAX)?;
    let mut report = SpectrumReport::from_eigenvalues(raw.eigenvalues, is_real_eigenvalue);
    let near_axis = report
        .eigenvalues
        .iter()
        .all(|e| e.im.abs() <= RECHECK_REL * (1.0 + e.norm()));
    if !report.all_real && near_axis && h.is_real(0.0) {
        let q = QMatrix::from_real(h)?;
        if all_roots_real(&characteristic_polynomial(&q)) {
            report = SpectrumReport::from_eigenvalues(report.eigenvalues, |_| true);
        }
    }
    Ok(report)
}

pub fn all_real(h: &CMatrix) -> Result<bool> {
    Ok(classify_spectrum(h)?.all_real)
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(
            "grid needs finite ends and steps >= 1".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "grid needs lo < hi, got {lo}, {hi}"
        )));
    }
    let step = (hi - lo) / (steps - 1) as f64;
    let mut g: Vec<f64> = (0..steps).map(|k| lo + step * k as f64).collect();
    g[steps - 1] = hi;
    Ok(g)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub parameter: f64,
    /// `None` when the eigensolver failed; the reason is in `failure`.
    pub spectrum: Option<SpectrumReport>,
    pub failure: Option<String>,
    pub min_metric_eigenvalue: Option<f64>,
}

impl SweepRecord {
    pub fn all_real(&self) -> bool {
        self.spectrum.as_ref().is_some_and(|s| s.all_real)
    }
}

/// One record per grid point, evaluated in parallel and returned in grid
/// order.
pub fn spectrum_sweep<F>(family: &F, grid: &[f64]) -> Result<Vec<SweepRecord>>
where
    F: Fn(f64) -> CMatrix + Sync,
{
    check_grid(grid)?;
    Ok(grid
        .par_iter()
        .map(|&r| {
            let (spectrum, failure) = match classify_spectrum(&family(r)) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRecord {
                parameter: r,
                spectrum,
                failure,
                min_metric_eigenvalue: None,
            }
        })
        .collect())
}

/// Bisection on the all-real indicator. The bracket ends must disagree.
pub fn kep_locate<F>(family: &F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> CMatrix,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need lo < hi and tol > 0, got ({lo}, {hi}), {tol}"
        )));
    }
    let flo = all_real(&family(lo))?;
    if flo == all_real(&family(hi))? {
        return Err(Error::BracketInvalid { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if all_real(&family(mid))? == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean of the two closest eigenvalues, the coalescing pair at an
/// exceptional point.
pub fn merger_energy(h: &CMatrix) -> Result<Complex64> {
    let ev = eigenvalues(h, f64::MAX)?.eigenvalues;
    let mut best: Option<(f64, Complex64)> = None;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            let d = (ev[i] - ev[j]).norm();
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, 0.5 * (ev[i] + ev[j])));
            }
        }
    }
    best.map(|(_, e)| e)
        .ok_or_else(|| Error::InvalidInput("need at least two eigenvalues".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// True when the end was refined by bisection; false when it is a
    /// window edge.
    pub lo_refined: bool,
    pub hi_refined: bool,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealityDomain {
    pub intervals: Vec<Interval>,
}

/// Runs of `true` in `flags` as index ranges.
fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push((s, k - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, flags.len() - 1));
    }
    out
}

/// Maximal all-real intervals inside the grid window, with interior ends
/// refined by [`kep_locate`] to `tol`.
pub fn reality_domain<F>(family: &F, grid: &[f64], tol: f64) -> Result<RealityDomain>
where
    F: Fn(f64) -> CMatrix + Sync,
{
    let records = spectrum_sweep(family, grid)?;
    let flags: Vec<bool> = records.iter().map(SweepRecord::all_real).collect();
    let last = grid.len() - 1;
    let mut intervals = Vec::new();
    for (a, b) in runs(&flags) {
        let (lo, lo_refined) = if a == 0 {
            (grid[0], false)
        } else {
            (kep_locate(family, (grid[a - 1], grid[a]), tol)?, true)
        };
        let (hi, hi_refined) = if b == last {
            (grid[last], false)
        } else {
            (kep_locate(family, (grid[b], grid[b + 1]), tol)?, true)
        };
        intervals.push(Interval {
            lo,
            hi,
            lo_refined,
            hi_refined,
        });
    }
    Ok(RealityDomain { intervals })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityRecord {
    pub parameter: f64,
    pub min_eigenvalue: Option<f64>,
    pub classification: Option<Classification>,
    /// Set when the metric source failed at this point (for example a
    /// singular parameter); the point is skipped.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityScan {
    pub records: Vec<PositivityRecord>,
    /// Maximal runs of positive-definite grid points, as `(first, last)`
    /// parameter values.
    pub intervals: Vec<(f64, f64)>,
}

/// Minimum-eigenvalue track of `source` over `grid` and its positive
/// definite runs.
pub fn positivity_domain<F>(source: &F, grid: &[f64], tol: f64) -> Result<PositivityScan>
where
    F: Fn(f64) -> Result<CMatrix> + Sync,
{
    check_grid(grid)?;
    let records: Vec<PositivityRecord> = grid
        .par_iter()
        .map(
            |&p| match source(p).and_then(|theta| positivity(&theta, tol)) {
                Ok(pos) => PositivityRecord {
                    parameter: p,
                    min_eigenvalue: Some(pos.min_eigenvalue),
                    classification: Some(pos.classification),
                    failure: None,
                },
                Err(e) => PositivityRecord {
                    parameter: p,
                    min_eigenvalue: None,
                    classification: None,
                    failure: Some(e.to_string()),
                },
            },
        )
        .collect();
    let flags: Vec<bool> = records
        .iter()
        .map(|r| r.classification == Some(Classification::PositiveDefinite))
        .collect();
    let intervals = runs(&flags)
        .into_iter()
        .map(|(a, b)| (grid[a], grid[b]))
        .collect();
    Ok(PositivityScan { records, intervals })
}

/// `Θ(1-R, (1-R)w, 0, 0, 0)` of `H_c(R)`.
pub fn hc_tridiagonal_metric(r: f64, w: f64) -> Result<CMatrix> {
    let s = 1.0 - r;
    hc_metric_family(r)?.instantiate(&[s, s * w, 0.0, 0.0, 0.0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalWConfig {
    /// Left edge of the `R` window.
    pub r_lo: f64,
    /// The window ends at `1 - eps`.
    pub eps: f64,
    pub points: usize,
    pub w_bracket: (f64, f64),
}

impl Default for CriticalWConfig {
    fn default() -> Self {
        Self {
            r_lo: 0.0,
            eps: 1e-3,
            points: 400,
            w_bracket: (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalW {
    pub w: f64,
    /// Left end of the positivity run reaching `1 - eps` at the returned `w`.
    pub r_min: f64,
}

/// Left end of the positive-definite run that reaches the right edge of
/// the window, if there is one with at least two grid points.
pub fn positivity_run_to_edge(w: f64, cfg: &CriticalWConfig) -> Result<Option<f64>> {
    let grid = linspace(cfg.r_lo, 1.0 - cfg.eps, cfg.points)?;
    let scan = positivity_domain(&|r| hc_tridiagonal_metric(r, w), &grid, CLASSIFICATION_TOL)?;
    let edge = *grid.last().expect("non-empty grid");
    Ok(scan
        .intervals
        .last()
        .filter(|(a, b)| *b == edge && a < b)
        .map(|(a, _)| *a))
}

/// Largest `w` for which `Θ(1-R, (1-R)w, 0, 0, 0)` stays positive definite
/// on a run `(R_min(w), 1 - eps)`, by bisection to width `tol`.
pub fn critical_w(tol: f64, cfg: &CriticalWConfig) -> Result<CriticalW> {
    let (mut lo, mut hi) = cfg.w_bracket;
    if positivity_run_to_edge(lo, cfg)?.is_none() || positivity_run_to_edge(hi, cfg)?.is_some() {
        return Err(Error::BracketInvalid { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if positivity_run_to_edge(mid, cfg)?.is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_min = positivity_run_to_edge(lo, cfg)?.expect("lower end keeps positivity");
    Ok(CriticalW { w: lo, r_min })
}

/// `P̃(ξ) = base + ξ·parity`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudometricFamily {
    pub base: CMatrix,
    pub parity: CMatrix,
    pub xi: f64,
}

impl PseudometricFamily {
    /// `Θ⁽⁷⁾(0, 0, 0, 0, 0, 1, 0) + ξ·P` for `H⁽⁷⁾(r)`.
    pub fn h7(r: f64, xi: f64) -> Result<Self> {
        let fam = recurrent_metric_family(&h7(r))?;
        let base = fam.instantiate(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0])?;
        Ok(Self {
            base,
            parity: build_parity(7)?,
            xi,
        })
    }

    pub fn with_xi(&self, xi: f64) -> Self {
        Self { xi, ..self.clone() }
    }

    pub fn matrix(&self) -> CMatrix {
        &self.base + &self.parity.scale(re(self.xi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudometricRecord {
    pub xi: f64,
    /// Ascending.
    pub tau: Vec<f64>,
    /// `min |τ|`, the conditioning score.
    pub min_abs: f64,
    pub invertible: bool,
    pub classification: Classification,
}

fn pseudometric_record(fam: &PseudometricFamily, tol: f64) -> PseudometricRecord {
    let tau = hermitian_eigenvalues(&fam.matrix());
    let min_abs = tau.iter().map(|t| t.abs()).fold(f64::INFINITY, f64::min);
    PseudometricRecord {
        xi: fam.xi,
        classification: classify(&tau, tol),
        invertible: min_abs > tol,
        min_abs,
        tau,
    }
}

/// Eigenvalue tracks of `P̃(ξ)` of `H⁽⁷⁾(r)` over `xi_grid`.
pub fn pseudometric_scan(r: f64, xi_grid: &[f64], tol: f64) -> Result<Vec<PseudometricRecord>> {
    check_grid(xi_grid)?;
    let fam = PseudometricFamily::h7(r, 0.0)?;
    Ok(xi_grid
        .par_iter()
        .map(|&xi| pseudometric_record(&fam.with_xi(xi), tol))
        .collect())
}

/// Invertibility of `P̃(ξ)` along an `R` grid, reported as the runs of
/// invertible points. Singular parameters break runs.
pub fn pseudometric_invertibility(xi: f64, r_grid: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    check_grid(r_grid)?;
    let flags: Vec<bool> = r_grid
        .par_iter()
        .map(|&r| {
            PseudometricFamily::h7(r, xi)
                .map(|f| pseudometric_record(&f, tol).invertible)
                .unwrap_or(false)
        })
        .collect();
    Ok(runs(&flags)
        .into_iter()
        .map(|(a, b)| (r_grid[a], r_grid[b]))
        .collect())
}

/// Root branch `τ(ξ) = slope·ξ + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBranch {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearBranch {
    pub fn at(&self, xi: f64) -> f64 {
        self.slope * xi + self.intercept
    }
}

/// Roots of `(τ+ξ)((τ+ξ)²-2)(((τ-ξ)²-2)²-2)`:
/// `-ξ`, `-ξ ± √2` and `ξ ± √(2 ± √2)`.
pub fn reduced_branches() -> Vec<LinearBranch> {
    let s2 = 2f64.sqrt();
    let inner = [(2.0 - s2).sqrt(), (2.0 + s2).sqrt()];
    let mut out = vec![
        LinearBranch {
            slope: -1.0,
            intercept: 0.0,
        },
        LinearBranch {
            slope: -1.0,
            intercept: s2,
        },
        LinearBranch {
            slope: -1.0,
            intercept: -s2,
        },
    ];
    for c in inner {
        out.push(LinearBranch {
            slope: 1.0,
            intercept: c,
        });
        out.push(LinearBranch {
            slope: 1.0,
            intercept: -c,
        });
    }
    out
}

/// Ascending coefficients in `τ` of `(τ+ξ)((τ+ξ)²-2)(((τ-ξ)²-2)²-2)`.
pub fn reduced_secular_polynomial(xi: f64) -> Vec<f64> {
    let mul = |p: &[f64], q: &[f64]| {
        let mut out = vec![0.0; p.len() + q.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    let plus = [xi, 1.0];
    let plus_sq = mul(&plus, &plus);
    let a = [plus_sq[0] - 2.0, plus_sq[1], plus_sq[2]];
    let minus = [-xi, 1.0];
    let minus_sq = mul(&minus, &minus);
    let b = [minus_sq[0] - 2.0, minus_sq[1], minus_sq[2]];
    let mut b2 = mul(&b, &b);
    b2[0] -= 2.0;
    mul(&mul(&plus, &a), &b2)
}

fn score(branches: &[LinearBranch], xi: f64) -> f64 {
    branches
        .iter()
        .map(|b| b.at(xi).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Shift `ξ ≥ 0` maximizing `min_j |τ_j(ξ)|` on the first lobe, i.e.
/// between the first two nonnegative zeros of the score. The maximum of
/// a minimum of `|linear|` functions sits where two of them meet, so only
/// pairwise intersections are candidates.
pub fn xi_optimize(branches: &[LinearBranch]) -> Result<f64> {
    let mut zeros: Vec<f64> = branches
        .iter()
        .filter(|b| b.slope != 0.0)
        .map(|b| -b.intercept / b.slope)
        .filter(|&x| x >= 0.0)
        .collect();
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    let (lo, hi) = match zeros.as_slice() {
        [a, b, ..] => (*a, *b),
        _ => {
            return Err(Error::InvalidInput(
                "score has no bounded lobe on xi >= 0".into(),
            ))
        }
    };
    let mut best: Option<(f64, f64)> = None;
    for (i, p) in branches.iter().enumerate() {
        for q in &branches[i + 1..] {
            // p = q and p = -q
            for (ds, dc) in [
                (p.slope - q.slope, q.intercept - p.intercept),
                (p.slope + q.slope, -(p.intercept + q.intercept)),
            ] {
                if ds == 0.0 {
                    continue;
                }
                let xi = dc / ds;
                if xi < lo || xi > hi {
                    continue;
                }
                let s = score(branches, xi);
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((xi, s));
                }
            }
        }
    }
    best.map(|(x, _)| x)
        .ok_or_else(|| Error::NumericalFailure("no branch intersection on the first lobe".into()))
}
