//! Command-line grammar and the validated [`RunConfig`].

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptlab_core::{EndpointModel, Preset};

use crate::model_file::parse_model_file;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ptlab",
    version,
    about = "Spectra, exceptional points and metrics of PT-symmetric lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Preset name or path to a JSON model file.
    #[arg(long)]
    pub model: String,
    /// Site count minus one for presets without a fixed size.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Eigenvalues along a coupling range.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// `min:max:steps`
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the exceptional point inside a bracket.
    Kep {
        #[command(flatten)]
        model: ModelArgs,
        /// `lo:hi`
        #[arg(long, allow_hyphen_values = true)]
        bracket: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Real bound states from the two-by-two boundary problem.
    BoundStates {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "R", default_value_t = 1.0, allow_hyphen_values = true)]
        r: f64,
        /// Energy grid points of the scan.
        #[arg(long, default_value_t = 4000)]
        points: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and certify a metric at one coupling.
    Metric {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "R", default_value_t = 1.0, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, value_enum)]
        method: MetricMethod,
        /// Comma-separated weights for the spectral and closed-form methods.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kappa: Vec<f64>,
        /// Comma-separated free parameters for the recurrent method.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        class_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum metric eigenvalue along a coupling range.
    Positivity {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, value_enum)]
        method: PositivityMethod,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        /// Off-diagonal ratio of the tridiagonal `hc` metric.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        class_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue tracks of the shifted `h7` pseudometric.
    Pseudometric {
        #[arg(long = "R", default_value_t = 0.0, allow_hyphen_values = true)]
        r: f64,
        /// `min:max:steps`
        #[arg(long, allow_hyphen_values = true)]
        xi_range: String,
        /// Optional `min:max:steps` coupling grid for the invertibility window.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        class_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricMethod {
    Spectral,
    Diagonal,
    Recurrent,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PositivityMethod {
    Spectral,
    Diagonal,
    Recurrent,
    Tridiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn grid(&self) -> Vec<f64> {
        ptlab_core::sweep::linspace(self.min, self.max, self.steps).expect("validated range")
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    let v = f64::from_str(s.trim())
        .map_err(|_| CliError::Config(format!("{what}: cannot parse {s:?} as a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("{what}: {s:?} is not finite")));
    }
    Ok(v)
}

impl FromStr for ParamRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(CliError::Config(format!(
                "range {s:?} is not min:max:steps"
            )));
        };
        let min = parse_f64(lo, "range min")?;
        let max = parse_f64(hi, "range max")?;
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("range steps {steps:?} is not a count")))?;
        if steps < 1 {
            return Err(CliError::Config("range needs steps >= 1".into()));
        }
        if !(min < max) {
            return Err(CliError::Config(format!(
                "range needs min < max, got {min}:{max}"
            )));
        }
        Ok(ParamRange { min, max, steps })
    }
}

pub fn parse_bracket(s: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("bracket {s:?} is not lo:hi")))?;
    let (lo, hi) = (parse_f64(lo, "bracket lo")?, parse_f64(hi, "bracket hi")?);
    if !(lo < hi) {
        return Err(CliError::Config(format!(
            "bracket needs lo < hi, got {lo}:{hi}"
        )));
    }
    Ok((lo, hi))
}

/// A preset family or a file model. File couplings are read as the unit
/// strength; the coupling parameter scales them.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Preset(Preset),
    File { path: PathBuf, model: EndpointModel },
}

impl ModelSource {
    pub fn resolve(name: &str, n: usize) -> Result<Self, CliError> {
        if let Some(p) = Preset::from_name(name, n) {
            return Ok(ModelSource::Preset(p));
        }
        let path = Path::new(name);
        if path.exists() {
            return Ok(ModelSource::File {
                path: path.to_path_buf(),
                model: parse_model_file(path)?,
            });
        }
        Err(CliError::Config(format!(
            "unknown model {name:?}: not a preset ({}) and no such file",
            Preset::names().join(", ")
        )))
    }

    pub fn model(&self, r: f64) -> EndpointModel {
        match self {
            ModelSource::Preset(p) => p.model(r),
            ModelSource::File { model, .. } => model.scaled(r),
        }
    }

    pub fn is_hc(&self) -> bool {
        matches!(self, ModelSource::Preset(Preset::Hc))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bisection width, root tolerance or similar per command.
    pub tol: f64,
    pub classification: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Spectrum,
    Kep {
        bracket: (f64, f64),
    },
    BoundStates {
        r: f64,
        points: usize,
    },
    Metric {
        r: f64,
        method: MetricMethod,
        kappa: Vec<f64>,
        params: Vec<f64>,
    },
    Positivity {
        method: PositivityMethod,
        params: Vec<f64>,
        w: Option<f64>,
    },
    Pseudometric {
        r: f64,
        window: Option<ParamRange>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` for commands with a fixed model.
    pub model: Option<ModelSource>,
    pub parameter_range: Option<ParamRange>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub command: Command,
}

fn positive(v: f64, what: &str) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "{what} must be positive, got {v}"
        )))
    }
}

fn finite(v: f64, what: &str) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{what} must be finite, got {v}")))
    }
}

fn finite_list(v: Vec<f64>, what: &str) -> Result<Vec<f64>, CliError> {
    for &x in &v {
        finite(x, what)?;
    }
    Ok(v)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let model = |m: &ModelArgs| ModelSource::resolve(&m.model, m.n).map(Some);
        let tols = |tol: f64, class: f64| -> Result<Tolerances, CliError> {
            Ok(Tolerances {
                tol: positive(tol, "tol")?,
                classification: positive(class, "class-tol")?,
            })
        };
        let default_class = ptlab_core::metric::CLASSIFICATION_TOL;
        Ok(match cli.command {
            CliCommand::Spectrum {
                model: m,
                range,
                out,
            } => RunConfig {
                model: model(&m)?,
                parameter_range: Some(range.parse()?),
                tolerances: tols(1e-8, default_class)?,
                out,
                command: Command::Spectrum,
            },
            CliCommand::Kep {
                model: m,
                bracket,
                tol,
                out,
            } => RunConfig {
                model: model(&m)?,
                parameter_range: None,
                tolerances: tols(tol, default_class)?,
                out,
                command: Command::Kep {
                    bracket: parse_bracket(&bracket)?,
                },
            },
            CliCommand::BoundStates {
                model: m,
                r,
                points,
                tol,
                out,
            } => {
                if points < 2 {
                    return Err(CliError::Config("points must be at least 2".into()));
                }
                RunConfig {
                    model: model(&m)?,
                    parameter_range: None,
                    tolerances: tols(tol, default_class)?,
                    out,
                    command: Command::BoundStates {
                        r: finite(r, "R")?,
                        points,
                    },
                }
            }
            CliCommand::Metric {
                model: m,
                r,
                method,
                kappa,
                params,
                class_tol,
                out,
            } => RunConfig {
                model: model(&m)?,
                parameter_range: None,
                tolerances: tols(1e-12, class_tol)?,
                out,
                command: Command::Metric {
                    r: finite(r, "R")?,
                    method,
                    kappa: finite_list(kappa, "kappa")?,
                    params: finite_list(params, "params")?,
                },
            },
            CliCommand::Positivity {
                model: m,
                range,
                method,
                params,
                w,
                class_tol,
                out,
            } => {
                let model = model(&m)?;
                if method == PositivityMethod::Tridiagonal {
                    if !model.as_ref().is_some_and(ModelSource::is_hc) {
                        return Err(CliError::Config(
                            "the tridiagonal metric is defined for hc only".into(),
                        ));
                    }
                    if w.is_none() {
                        return Err(CliError::Config("the tridiagonal metric needs --w".into()));
                    }
                }
                RunConfig {
                    model,
                    parameter_range: Some(range.parse()?),
                    tolerances: tols(1e-12, class_tol)?,
                    out,
                    command: Command::Positivity {
                        method,
                        params: finite_list(params, "params")?,
                        w: w.map(|w| finite(w, "w")).transpose()?,
                    },
                }
            }
            CliCommand::Pseudometric {
                r,
                xi_range,
                window,
                class_tol,
                out,
            } => RunConfig {
                model: None,
                parameter_range: Some(xi_range.parse()?),
                tolerances: tols(1e-12, class_tol)?,
                out,
                command: Command::Pseudometric {
                    r: finite(r, "R")?,
                    window: window.map(|w| w.parse()).transpose()?,
                },
            },
        })
    }
}
