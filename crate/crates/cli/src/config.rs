//! Run configuration: TOML file, then command-line overrides.

use std::path::{Path, PathBuf};

use clap::Args;
use dipole_core::imaging::{ImagingParams, DEFAULT_EPSILON, DEFAULT_K_LOC, DEFAULT_RHO};
use dipole_core::localization::DEFAULT_THRESHOLD;
use dipole_core::pipeline::ReconstructionParams;
use dipole_core::strengths::DEFAULT_K_STRENGTH;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::spec::{DirectionSpec, GridSpec};

pub const DEFAULT_GRID: &str = "-1.5:1.5:31,-1.5:1.5:31,-1.5:1.5:31";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scene: Option<PathBuf>,
    pub directions: String,
    /// Largest simulated wavenumber.
    pub k_max: f64,
    /// Wavenumber nodes. Unset picks the smallest count resolving the grid.
    pub nodes: Option<usize>,
    pub delta: f64,
    pub seed: u64,
    pub grid: String,
    pub k_loc: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub threshold: f64,
    pub k_strength: f64,
    pub measurements: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub field: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scene: None,
            directions: "fib:10".into(),
            k_max: 200.0,
            nodes: None,
            delta: 0.0,
            seed: 0,
            grid: DEFAULT_GRID.into(),
            k_loc: DEFAULT_K_LOC,
            epsilon: DEFAULT_EPSILON,
            rho: DEFAULT_RHO,
            threshold: DEFAULT_THRESHOLD,
            k_strength: DEFAULT_K_STRENGTH,
            measurements: None,
            report: None,
            field: None,
        }
    }
}

/// Flags shared by the run subcommands. Each one overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// TOML file with any `RunConfig` keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scene JSON.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// `fib:L`, `plane:L` or a JSON file of vectors.
    #[arg(long)]
    pub directions: Option<String>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Relative noise level.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `x0:x1:nx,y0:y1:ny,z0:z1:nz`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub k_loc: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub k_strength: Option<f64>,
    /// Measurement CSV, written by `simulate` and read by the others.
    #[arg(long)]
    pub measurements: Option<PathBuf>,
    /// Report JSON output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Indicator field CSV output.
    #[arg(long)]
    pub field: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))
    }

    pub fn resolve(args: &ConfigArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &args.$f {
                    cfg.$f = v.clone().into();
                }
            )*};
        }
        take!(scene, nodes, measurements, report, field);
        take!(directions, k_max, delta, seed, grid, k_loc, epsilon, rho, threshold, k_strength);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks values that do not depend on input files.
    pub fn validate(&self) -> Result<()> {
        self.direction_spec()?;
        self.grid_spec()?;
        self.params().imaging.validate()?;
        self.check_bands(self.k_max)?;
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(CliError::Config(format!("threshold must lie in (0, 1], got {}", self.threshold)));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(CliError::Config(format!("delta must be finite and >= 0, got {}", self.delta)));
        }
        Ok(())
    }

    /// Both band limits must lie within the simulated band.
    pub fn check_bands(&self, data_k_max: f64) -> Result<()> {
        for (name, k) in [("k_loc", self.k_loc), ("k_strength", self.k_strength)] {
            if !(k > 0.0) || k > data_k_max {
                return Err(CliError::Config(format!(
                    "{name} = {k} must lie in (0, {data_k_max}], the simulated band"
                )));
            }
        }
        Ok(())
    }

    pub fn direction_spec(&self) -> Result<DirectionSpec> {
        self.directions.parse()
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        self.grid.parse()
    }

    pub fn params(&self) -> ReconstructionParams {
        ReconstructionParams {
            imaging: ImagingParams {
                k_max: self.k_loc,
                epsilon: self.epsilon,
                rho: self.rho,
            },
            k_strength: self.k_strength,
            threshold: self.threshold,
        }
    }

    /// SHA-256 over the canonical JSON form, hex encoded. Output paths are
    /// left out so reruns into other files hash alike.
    pub fn hash(&self) -> String {
        let inputs = RunConfig {
            report: None,
            field: None,
            ..self.clone()
        };
        let bytes = serde_json::to_vec(&inputs).expect("plain data serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("`{name}` is required (flag --{name} or config key)")))
    }
}
