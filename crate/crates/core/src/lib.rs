//! Spectra, resonances and resolvent continuation for Laplacians on manifolds
//! with cylindrical, cusp and corner ends.

pub mod continuation;
pub mod corner;
pub mod discretize;
pub mod error;
pub mod io;
pub mod lap;
pub mod modes;
pub mod numerics;
pub mod oracle;
pub mod scaling;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
