//! JSON model files with explicit `{re, im}` pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use ptlab_core::EndpointModel;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDto {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexDto> for Complex64 {
    fn from(c: ComplexDto) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexDto {
    fn from(c: Complex64) -> Self {
        ComplexDto { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDto {
    pub n: usize,
    pub z: ComplexDto,
    pub a: f64,
    pub b: f64,
    pub alpha: Vec<ComplexDto>,
    pub beta: Vec<ComplexDto>,
}

impl ModelDto {
    pub fn into_model(self) -> Result<EndpointModel, CliError> {
        EndpointModel::new(
            self.n,
            self.z.into(),
            self.a,
            self.b,
            self.alpha.into_iter().map(Into::into).collect(),
            self.beta.into_iter().map(Into::into).collect(),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

impl From<&EndpointModel> for ModelDto {
    fn from(m: &EndpointModel) -> Self {
        ModelDto {
            n: m.n(),
            z: m.z.into(),
            a: m.a,
            b: m.b,
            alpha: m.alpha().iter().map(|&c| c.into()).collect(),
            beta: m.beta().iter().map(|&c| c.into()).collect(),
        }
    }
}

pub fn parse_model_str(text: &str) -> Result<EndpointModel, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let dto: ModelDto = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.inner()))
    })?;
    dto.into_model()
}

pub fn parse_model_file(path: &Path) -> Result<EndpointModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_model_str(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Canonical pretty-printed form.
pub fn serialize_model(model: &EndpointModel) -> String {
    serde_json::to_string_pretty(&ModelDto::from(model)).expect("plain data serializes")
}
