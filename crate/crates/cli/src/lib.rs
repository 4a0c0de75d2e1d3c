//! Command-line front end: model files, run configuration, subcommand
//! dispatch and CSV output.
//!
//! Exit status is 0 on success, 1 on a configuration error and 2 on a
//! numerical failure. `PTLAB_THREADS` caps the worker pool used by sweeps.

pub mod commands;
pub mod config;
pub mod model_file;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::run_subcommand;
pub use config::{Cli, RunConfig};
pub use model_file::{parse_model_file, parse_model_str, serialize_model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<ptlab_core::Error> for CliError {
    fn from(e: ptlab_core::Error) -> Self {
        use ptlab_core::Error as E;
        match e {
            E::InvalidDimension(_)
            | E::InvalidModel { .. }
            | E::InvalidParameter(_)
            | E::InvalidInput(_)
            | E::DimensionMismatch { .. }
            | E::UnsupportedModel(_)
            | E::BracketInvalid { .. } => CliError::Config(e.to_string()),
            E::SingularParameter(_)
            | E::NumericalFailure(_)
            | E::NotAnEigenvalue { .. }
            | E::Deficient { .. }
            | E::ResolventPole { .. }
            | E::NotRecurrentlySolvable { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

/// Reads `PTLAB_THREADS` and sizes the global worker pool. A pool that is
/// already running is left as is.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Config(format!(
            "PTLAB_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses `args`, runs the command and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = configure_threads(std::env::var("PTLAB_THREADS").ok().as_deref())
        .and_then(|()| RunConfig::from_cli(cli))
        .and_then(|config| run_subcommand(&config, stdout, stderr));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "ptlab: {e}");
            e.exit_code()
        }
    }
}
