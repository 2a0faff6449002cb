//! Pseudospectral simulation and verification of reaction-diffusion-advection
//! systems `∂t u = D ∂xx u + C ∂x u + f(u, ∂x u)` on a periodic box.
//!
//! Modules follow the pipeline: [`nonlinearity`] parses and classifies `f`,
//! [`spectral`] holds the Fourier machinery, [`integrator`] steps in time,
//! [`diagnostics`] measures decay, [`scenarios`] builds the model families,
//! and [`cli_io`] reads configs and writes results.

pub mod cli_io;
pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod nonlinearity;
pub mod scenarios;
pub mod spectral;

pub use error::{Error, ParseError, Result};
