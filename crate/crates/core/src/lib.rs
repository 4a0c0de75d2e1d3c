//! Numerics for PT-symmetric tight-binding lattices with non-Hermitian
//! endpoint interactions: spectra, boundary-reduced bound states, metric
//! operators and parameter sweeps.

pub mod boundary;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod metric;
pub mod poly;
pub mod sweep;

pub use error::{Error, Result};
pub use lattice::{EndpointModel, Preset};
pub use matrix::CMatrix;
