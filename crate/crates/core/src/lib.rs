//! Spectral toolkit for functions on the unit circle.
//!
//! The crate provides periodic grid functions with FFT-backed analysis and
//! synthesis, the half-order Sobolev seminorm in both its spectral and
//! double-integral forms, the Stieltjes pairing `(1/2pi) \int x dy` with its
//! spectral identity, piecewise-linear circle homeomorphisms and composition,
//! translation/convolution/mollification families, quantitative scan
//! experiments over those families, and a Theodorsen-type conformal solver
//! that constructs an improving change of variable for positive boundary
//! radius profiles.

pub mod bohr_pal;
pub mod builtins;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod families;
pub mod fourier;
pub mod homeo;
pub mod io;
pub mod sobolev;
pub mod stieltjes;
mod threads;

pub use error::{Error, Result};
pub use fourier::{analyze, fejer_sum, synthesize, FourierSeries, GridFunction};
