//! Subcommand dispatch.

use std::io::Write;

use ptlab_core::boundary::{bound_state_scan, ScanGrid};
use ptlab_core::matrix::CMatrix;
use ptlab_core::metric::{
    closed_form_metric, diagonal_metric, hc_metric_family, metric_spectral,
    recurrent_metric_family, MetricCertificate,
};
use ptlab_core::sweep::{
    hc_tridiagonal_metric, kep_locate, merger_energy, positivity_domain,
    pseudometric_invertibility, pseudometric_scan, reduced_branches, spectrum_sweep, xi_optimize,
};
use ptlab_core::Error;

use crate::config::{Command, MetricMethod, ModelSource, PositivityMethod, RunConfig};
use crate::output::{num, Table};
use crate::CliError;

fn model_of(config: &RunConfig) -> Result<&ModelSource, CliError> {
    config
        .model
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs --model".into()))
}

fn say(w: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(w, "{line}").map_err(|e| CliError::Config(format!("cannot write summary: {e}")))
}

/// Runs one command. The table goes to the declared output path, or to
/// `stdout` when there is none; summary lines then go to `stderr` so the
/// table stays parseable.
pub fn run_subcommand(
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let out = config.out.as_deref();
    let mut summary = |line: String, stdout: &mut dyn Write| {
        if out.is_some() {
            say(stdout, line)
        } else {
            say(stderr, line)
        }
    };
    match &config.command {
        Command::Spectrum => {
            let src = model_of(config)?;
            let grid = config.parameter_range.expect("spectrum has a range").grid();
            let records = spectrum_sweep(&|r| src.model(r).hamiltonian(), &grid)?;
            let mut table = Table::new(&["R", "idx", "re", "im"]);
            for rec in &records {
                let spec = rec.spectrum.as_ref().ok_or_else(|| {
                    CliError::Numerical(format!(
                        "R = {}: {}",
                        rec.parameter,
                        rec.failure.as_deref().unwrap_or("eigensolver failed")
                    ))
                })?;
                for (k, e) in spec.eigenvalues.iter().enumerate() {
                    table.push(vec![
                        num(rec.parameter),
                        k.to_string(),
                        num(e.re),
                        num(e.im),
                    ]);
                }
            }
            table.emit(out, stdout)
        }
        Command::Kep { bracket } => {
            let src = model_of(config)?;
            let tol = config.tolerances.tol;
            let family = |r: f64| src.model(r).hamiltonian();
            let r = kep_locate(&family, *bracket, tol)?;
            let e = merger_energy(&family(r))?;
            let decimals = (-tol.log10() - 1e-9).ceil().clamp(0.0, 17.0) as usize;
            say(stdout, format!("{r:.decimals$}"))?;
            if out.is_some() {
                let mut table = Table::new(&["R", "merger_re", "merger_im"]);
                table.push(vec![num(r), num(e.re), num(e.im)]);
                table.emit(out, stdout)?;
            }
            Ok(())
        }
        Command::BoundStates { r, points } => {
            let model = model_of(config)?.model(*r);
            let h = model.hamiltonian();
            let scan = bound_state_scan(
                &model,
                &ScanGrid::covering(&model, *points),
                config.tolerances.tol,
            )?;
            let mut table = Table::new(&["idx", "E", "residual"]);
            for (k, s) in scan.states.iter().enumerate() {
                table.push(vec![k.to_string(), num(s.energy.re), num(s.residual(&h))]);
            }
            table.emit(out, stdout)?;
            summary(
                format!(
                    "{} bound states, {} grid points skipped",
                    scan.states.len(),
                    scan.skipped.len()
                ),
                stdout,
            )
        }
        Command::Metric {
            r,
            method,
            kappa,
            params,
        } => {
            let src = model_of(config)?;
            let model = src.model(*r);
            let h = model.hamiltonian();
            let weights = |dim: usize| {
                if kappa.is_empty() {
                    vec![1.0; dim]
                } else {
                    kappa.clone()
                }
            };
            let cert = match method {
                MetricMethod::Spectral => metric_spectral(&h, &weights(model.dim()))?,
                MetricMethod::ClosedForm => closed_form_metric(&model, &weights(model.dim()))?,
                MetricMethod::Diagonal => {
                    let (m0, _, _) = diagonal_metric(&model)?.ok_or_else(|| {
                        CliError::Numerical(format!("no positive diagonal metric at R = {r}"))
                    })?;
                    // report with Θ_00 = 1
                    let theta = ptlab_core::metric::diagonal_metric_theta(&model)?
                        .expect("existence checked above")
                        .scale(ptlab_core::matrix::re(1.0 / m0));
                    MetricCertificate::new(&h, theta)?
                }
                MetricMethod::Recurrent => {
                    let family = if src.is_hc() {
                        hc_metric_family(*r)?
                    } else {
                        recurrent_metric_family(&h)?
                    };
                    if params.len() != family.arity() {
                        return Err(CliError::Config(format!(
                            "--params needs {} values ({})",
                            family.arity(),
                            family.parameter_names.join(", ")
                        )));
                    }
                    MetricCertificate::new(&h, family.instantiate(params)?)?
                }
            };
            let mut table = Table::new(&["i", "j", "re", "im"]);
            let dim = cert.theta.rows();
            for i in 0..dim {
                for j in 0..dim {
                    let v = cert.theta[(i, j)];
                    table.push(vec![i.to_string(), j.to_string(), num(v.re), num(v.im)]);
                }
            }
            table.emit(out, stdout)?;
            let p = ptlab_core::metric::positivity(&cert.theta, config.tolerances.classification)?;
            summary(
                format!(
                    "residual={} min_eig={} classification={}",
                    num(cert.dieudonne_residual),
                    num(p.min_eigenvalue),
                    p.classification
                ),
                stdout,
            )
        }
        Command::Positivity { method, params, w } => {
            let src = model_of(config)?;
            let grid = config
                .parameter_range
                .expect("positivity has a range")
                .grid();
            let source = |r: f64| -> ptlab_core::Result<CMatrix> {
                let model = src.model(r);
                match method {
                    PositivityMethod::Spectral => {
                        Ok(metric_spectral(&model.hamiltonian(), &vec![1.0; model.dim()])?.theta)
                    }
                    PositivityMethod::Diagonal => {
                        ptlab_core::metric::diagonal_metric_theta(&model)?.ok_or_else(|| {
                            Error::NumericalFailure(format!(
                                "no positive diagonal metric at R = {r}"
                            ))
                        })
                    }
                    PositivityMethod::Recurrent => {
                        let family = if src.is_hc() {
                            hc_metric_family(r)?
                        } else {
                            recurrent_metric_family(&model.hamiltonian())?
                        };
                        family.instantiate(params)
                    }
                    PositivityMethod::Tridiagonal => {
                        hc_tridiagonal_metric(r, w.expect("validated"))
                    }
                }
            };
            let scan = positivity_domain(&source, &grid, config.tolerances.classification)?;
            let mut table = Table::new(&["param", "min_eig", "classification"]);
            for rec in &scan.records {
                let (m, c) = match (rec.min_eigenvalue, rec.classification) {
                    (Some(m), Some(c)) => (num(m), c.to_string()),
                    _ => (num(f64::NAN), "failed".to_string()),
                };
                table.push(vec![num(rec.parameter), m, c]);
            }
            table.emit(out, stdout)?;
            for (a, b) in &scan.intervals {
                summary(
                    format!("positive-definite on [{}, {}]", num(*a), num(*b)),
                    stdout,
                )?;
            }
            Ok(())
        }
        Command::Pseudometric { r, window } => {
            let grid = config
                .parameter_range
                .expect("pseudometric has a range")
                .grid();
            let records = pseudometric_scan(*r, &grid, config.tolerances.classification)?;
            let mut table = Table::new(&["xi", "idx", "tau"]);
            for rec in &records {
                for (k, t) in rec.tau.iter().enumerate() {
                    table.push(vec![num(rec.xi), k.to_string(), num(*t)]);
                }
            }
            table.emit(out, stdout)?;
            let xi = xi_optimize(&reduced_branches())?;
            summary(format!("xi_opt={}", num(xi)), stdout)?;
            if let Some(w) = window {
                for (a, b) in
                    pseudometric_invertibility(xi, &w.grid(), config.tolerances.classification)?
                {
                    summary(format!("invertible on [{}, {}]", num(a), num(b)), stdout)?;
                }
            }
            Ok(())
        }
    }
}
