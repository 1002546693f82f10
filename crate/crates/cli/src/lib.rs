//! File formats, run configuration and subcommands behind the `dipole`
//! binary.

// `!(x > 0.0)` style guards also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod spec;

pub use error::{CliError, Result};
