//! Recurrent solution of `HᵀΘ = ΘH` for real symmetric `Θ`.
//!
//! Every upper-triangle entry `Θ_ij` is an unknown. A set of seed entries
//! becomes the free parameters, and the equations `M_ij = 0` (`i < j`) are
//! swept repeatedly; whenever one contains a single unresolved unknown it
//! is solved for that unknown as a [`LinearForm`] in the parameters.
//! Couplings in the first column below the pivot (`α_k`, `k ≥ 2`, and the
//! corner `a`) leave no such equation; the remaining entries are then
//! solved jointly.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::matrix::{re, CMatrix};

/// Pivots at or below this magnitude are treated as vanishing.
pub const PIVOT_TOL: f64 = 1e-12;
const CONSTRAINT_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-10;

/// `c · x + constant` over a fixed number of parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub coefficients: Vec<f64>,
    pub constant: f64,
}

impl LinearForm {
    pub fn zero(arity: usize) -> Self {
        Self {
            coefficients: vec![0.0; arity],
            constant: 0.0,
        }
    }

    pub fn parameter(arity: usize, k: usize) -> Self {
        let mut f = Self::zero(arity);
        f.coefficients[k] = 1.0;
        f
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, other: &LinearForm, s: f64) {
        for (a, b) in self.coefficients.iter_mut().zip(&other.coefficients) {
            *a += s * b;
        }
        self.constant += s * other.constant;
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
            constant: self.constant * s,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients
            .iter()
            .fold(self.constant.abs(), |m, c| m.max(c.abs()))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (k, c) in self.coefficients.iter().enumerate() {
            if *c != 0.0 {
                write!(f, " + {c}·x{}", k + 1)?;
            }
        }
        Ok(())
    }
}

/// Symmetric matrix of linear forms; instantiating it at a parameter
/// vector gives a metric candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFamily {
    pub dim: usize,
    /// Row-major, `dim × dim`, symmetric.
    pub entries: Vec<LinearForm>,
    pub parameter_names: Vec<String>,
    pub model_tag: String,
}

impl MetricFamily {
    pub fn arity(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i * self.dim + j]
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.model_tag = tag.into();
        self
    }

    pub fn instantiate(&self, x: &[f64]) -> Result<CMatrix> {
        if x.len() != self.arity() {
            return Err(Error::InvalidParameter(format!(
                "family takes {} parameters, got {}",
                self.arity(),
                x.len()
            )));
        }
        Ok(CMatrix::from_fn(self.dim, self.dim, |i, j| {
            re(self.entry(i, j).eval(x))
        }))
    }

    /// Instantiations at the unit parameter vectors, minus the constant part.
    pub fn basis(&self) -> Vec<CMatrix> {
        (0..self.arity())
            .map(|k| {
                CMatrix::from_fn(self.dim, self.dim, |i, j| {
                    re(self.entry(i, j).coefficients[k])
                })
            })
            .collect()
    }
}

/// Family seeded by the first row `Θ_00, …, Θ_0N`, named `x1 … x{N+1}`.
pub fn recurrent_metric_family(h: &CMatrix) -> Result<MetricFamily> {
    let n = h.square_dim("Hamiltonian")?;
    let seeds: Vec<(usize, usize)> = (0..n).map(|j| (0, j)).collect();
    let names: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    recurrent_metric_family_seeded(h, &seeds, &names)
}

/// Seeds and names of the five-parameter family `Θ(t, u, z, q, p)` of
/// `H_c(R)`: `t = Θ_22` and the off-diagonal first row.
pub const HC_SEEDS: [(usize, usize); 5] = [(2, 2), (0, 1), (0, 2), (0, 3), (0, 4)];
pub const HC_NAMES: [&str; 5] = ["t", "u", "z", "q", "p"];

/// `Θ(t, u, z, q, p)` for `H_c(r)`.
pub fn hc_metric_family(r: f64) -> Result<MetricFamily> {
    Ok(
        recurrent_metric_family_seeded(&crate::lattice::hc(r), &HC_SEEDS, &HC_NAMES)?
            .with_tag(format!("hc(R={r})")),
    )
}

fn slot(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

fn pair(n: usize, s: usize) -> (usize, usize) {
    let mut i = 0;
    let mut start = 0;
    while start + (n - i) <= s {
        start += n - i;
        i += 1;
    }
    (i, i + s - start)
}

/// One equation `M_ij = 0` as sparse coefficients over the unknowns.
struct Equation {
    at: (usize, usize),
    terms: Vec<(usize, f64)>,
}

fn equations(h: &CMatrix) -> Vec<Equation> {
    let n = h.rows();
    let mut out = Vec::new();
    // row by row, right to left
    for i in 0..n {
        for j in (i + 1..n).rev() {
            let mut acc: Vec<(usize, f64)> = Vec::new();
            let mut push = |u: usize, c: f64| {
                if c == 0.0 {
                    return;
                }
                match acc.iter_mut().find(|(v, _)| *v == u) {
                    Some(t) => t.1 += c,
                    None => acc.push((u, c)),
                }
            };
            for k in 0..n {
                push(slot(n, k, j), h[(k, i)].re);
                push(slot(n, i, k), -h[(k, j)].re);
            }
            acc.retain(|(_, c)| *c != 0.0);
            out.push(Equation {
                at: (i, j),
                terms: acc,
            });
        }
    }
    out
}

fn residual_form(eq: &Equation, known: &[Option<LinearForm>], arity: usize) -> LinearForm {
    let mut f = LinearForm::zero(arity);
    for &(u, c) in &eq.terms {
        if let Some(k) = &known[u] {
            f.add_scaled(k, c);
        }
    }
    f
}

fn constraint_error(eq: &Equation, form: &LinearForm) -> Error {
    Error::SingularParameter(format!(
        "equation M{:?} constrains the parameters: {form} = 0",
        eq.at
    ))
}

/// Least-squares completion of a stalled sweep: the open equations are
/// solved jointly for the unresolved entries as linear forms. Fails when
/// they do not pin those entries down.
fn complete(
    eqs: &[Equation],
    done: &[bool],
    known: &mut [Option<LinearForm>],
    arity: usize,
    n: usize,
) -> Result<()> {
    let open: Vec<usize> = (0..known.len()).filter(|&u| known[u].is_none()).collect();
    let rows: Vec<&Equation> = eqs
        .iter()
        .zip(done)
        .filter(|(eq, d)| !**d && eq.terms.iter().any(|(u, _)| known[*u].is_none()))
        .map(|(eq, _)| eq)
        .collect();
    let stalled = || Error::NotRecurrentlySolvable {
        unresolved: open.iter().map(|&u| pair(n, u)).collect(),
    };
    if rows.len() < open.len() {
        return Err(stalled());
    }
    let a = CMatrix::from_fn(rows.len(), open.len(), |r, k| {
        re(rows[r]
            .terms
            .iter()
            .filter(|(u, _)| *u == open[k])
            .map(|(_, c)| c)
            .sum())
    });
    let rhs: Vec<LinearForm> = rows
        .iter()
        .map(|eq| residual_form(eq, known, arity).scaled(-1.0))
        .collect();
    let dec = svd(&a);
    let smax = dec.singular_values[0];
    if dec
        .singular_values
        .iter()
        .any(|&s| s <= RANK_TOL * smax.max(1.0))
    {
        return Err(stalled());
    }
    for (k, &u) in open.iter().enumerate() {
        let mut f = LinearForm::zero(arity);
        for (l, s) in dec.singular_values.iter().enumerate() {
            let w = dec.v[l][k].re / s;
            for (r, b) in rhs.iter().enumerate() {
                f.add_scaled(b, w * dec.u[l][r].re);
            }
        }
        known[u] = Some(f);
    }
    Ok(())
}

/// Family seeded at the given entries, which become the parameters in
/// order.
pub fn recurrent_metric_family_seeded(
    h: &CMatrix,
    seeds: &[(usize, usize)],
    names: &[&str],
) -> Result<MetricFamily> {
    let n = h.square_dim("Hamiltonian")?;
    if !h.is_real(0.0) {
        return Err(Error::InvalidInput(
            "recurrent metric families need a real Hamiltonian".into(),
        ));
    }
    if names.len() != seeds.len() {
        return Err(Error::InvalidParameter(
            "one name per seed is required".into(),
        ));
    }
    let arity = seeds.len();
    let unknowns = n * (n + 1) / 2;
    let mut known: Vec<Option<LinearForm>> = vec![None; unknowns];
    for (k, &(i, j)) in seeds.iter().enumerate() {
        if i >= n || j >= n {
            return Err(Error::InvalidParameter(format!(
                "seed ({i}, {j}) outside {n}x{n}"
            )));
        }
        let s = slot(n, i, j);
        if known[s].is_some() {
            return Err(Error::InvalidParameter(format!(
                "seed ({i}, {j}) given twice"
            )));
        }
        known[s] = Some(LinearForm::parameter(arity, k));
    }

    let eqs = equations(h);
    let mut done = vec![false; eqs.len()];
    let scale = h.max_abs().max(1.0);
    loop {
        let mut progress = false;
        let mut weak: Option<(usize, usize, f64)> = None;
        for (e, eq) in eqs.iter().enumerate() {
            if done[e] {
                continue;
            }
            let open: Vec<(usize, f64)> = eq
                .terms
                .iter()
                .copied()
                .filter(|(u, _)| known[*u].is_none())
                .collect();
            match open.as_slice() {
                [] => done[e] = true,
                [(u, c)] if c.abs() > PIVOT_TOL => {
                    let f = residual_form(eq, &known, arity).scaled(-1.0 / c);
                    known[*u] = Some(f);
                    done[e] = true;
                    progress = true;
                }
                [(u, c)] => {
                    weak.get_or_insert((e, *u, *c));
                }
                _ => {}
            }
        }
        if known.iter().all(Option::is_some) {
            break;
        }
        if !progress {
            for (e, eq) in eqs.iter().enumerate() {
                if done[e] {
                    let form = residual_form(eq, &known, arity);
                    if form.max_abs() > CONSTRAINT_TOL * scale {
                        return Err(constraint_error(eq, &form));
                    }
                }
            }
            if let Some((e, u, c)) = weak {
                return Err(Error::SingularParameter(format!(
                    "pivot {c:.3e} for entry {:?} in equation M{:?}",
                    pair(n, u),
                    eqs[e].at
                )));
            }
            complete(&eqs, &done, &mut known, arity, n)?;
            break;
        }
    }

    for eq in &eqs {
        let form = residual_form(eq, &known, arity);
        let size = eq
            .terms
            .iter()
            .map(|&(u, c)| c.abs() * known[u].as_ref().map_or(0.0, LinearForm::max_abs))
            .fold(scale, f64::max);
        if form.max_abs() > CONSTRAINT_TOL * size {
            return Err(constraint_error(eq, &form));
        }
    }

    let forms: Vec<LinearForm> = known
        .into_iter()
        .map(|f| f.expect("all resolved"))
        .collect();
    let entries = (0..n * n)
        .map(|k| forms[slot(n, k / n, k % n)].clone())
        .collect();
    Ok(MetricFamily {
        dim: n,
        entries,
        parameter_names: names.iter().map(|s| s.to_string()).collect(),
        model_tag: String::new(),
    })
}
