//! Simulation and reconstruction of mixed magnetic/electric dipole arrays
//! from multi-frequency electric far-field data at sparse observation
//! directions.
//!
//! The forward model produces far-field samples at `±x̂` for each direction
//! and wavenumber; [`imaging`] turns them into phase-compensated band
//! integrals and indicator values, [`localization`] finds the indicator
//! peaks on a grid, and [`strengths`] recovers the complex polarization at
//! each peak. [`pipeline`] chains the three.

// `!(x > 0.0)` style guards also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod geometry;
pub mod imaging;
pub mod localization;
pub mod noise;
pub mod oracle;
mod par;
pub mod pipeline;
pub mod scene;
pub mod strengths;

pub use error::{Error, Result};
pub use par::Execution;
