//! Grid and direction specification strings.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dipole_core::geometry::{fibonacci_directions, planar_directions, DirectionSet, Provenance, UnitVec3, Vec3};
use dipole_core::localization::SamplingGrid;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// `x0:x1:nx,y0:y1:ny,z0:z1:nz`. A frozen axis uses `n = 1` with `x0 = x1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    text: String,
    grid: SamplingGrid,
}

impl GridSpec {
    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: String| CliError::Spec {
            what: "grid spec",
            spec: s.to_string(),
            reason,
        };
        let axes: Vec<&str> = s.split(',').map(str::trim).collect();
        if axes.len() != 3 {
            return Err(err(format!("expected 3 comma-separated axes, got {}", axes.len())));
        }
        let mut lower = [0.0; 3];
        let mut upper = [0.0; 3];
        let mut counts = [0usize; 3];
        for (a, axis) in axes.iter().enumerate() {
            let parts: Vec<&str> = axis.split(':').collect();
            if parts.len() != 3 {
                return Err(err(format!("axis {a}: expected lo:hi:n, got `{axis}`")));
            }
            lower[a] = parts[0].parse().map_err(|e| err(format!("axis {a} lower bound: {e}")))?;
            upper[a] = parts[1].parse().map_err(|e| err(format!("axis {a} upper bound: {e}")))?;
            counts[a] = parts[2].parse().map_err(|e| err(format!("axis {a} node count: {e}")))?;
        }
        let grid = SamplingGrid::new(Vec3(lower), Vec3(upper), counts).map_err(|e| err(e.to_string()))?;
        Ok(GridSpec {
            text: s.to_string(),
            grid,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `fib:L`, `plane:L`, or a path to a JSON file of direction vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectionSpec {
    Fibonacci(usize),
    Planar(usize),
    File(PathBuf),
}

/// Either a bare list of vectors or an object carrying them.
#[derive(Deserialize)]
#[serde(untagged)]
enum DirectionsJson {
    List(Vec<[f64; 3]>),
    Object {
        directions: Vec<[f64; 3]>,
        #[serde(default)]
        provenance: Option<Provenance>,
    },
}

impl DirectionSpec {
    pub fn resolve(&self) -> Result<DirectionSet> {
        match self {
            DirectionSpec::Fibonacci(l) => Ok(fibonacci_directions(*l)?),
            DirectionSpec::Planar(l) => Ok(planar_directions(*l)?),
            DirectionSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let parsed: DirectionsJson =
                    serde_json::from_str(&text).map_err(|e| CliError::parse(path, format!("expected a list of [x, y, z] vectors: {e}")))?;
                let (vectors, provenance) = match parsed {
                    DirectionsJson::List(v) => (v, Provenance::Explicit),
                    DirectionsJson::Object { directions, provenance } => (directions, provenance.unwrap_or(Provenance::Explicit)),
                };
                let units = vectors
                    .iter()
                    .map(|v| UnitVec3::normalize(Vec3(*v)))
                    .collect::<dipole_core::Result<Vec<_>>>()
                    .map_err(|e| CliError::parse(path, e.to_string()))?;
                DirectionSet::new(units, provenance).map_err(|e| CliError::parse(path, e.to_string()))
            }
        }
    }
}

impl FromStr for DirectionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let count = |rest: &str| {
            rest.parse::<usize>().map_err(|e| CliError::Spec {
                what: "direction spec",
                spec: s.to_string(),
                reason: format!("bad direction count: {e}"),
            })
        };
        if let Some(rest) = s.strip_prefix("fib:") {
            Ok(DirectionSpec::Fibonacci(count(rest)?))
        } else if let Some(rest) = s.strip_prefix("plane:") {
            Ok(DirectionSpec::Planar(count(rest)?))
        } else if s.is_empty() {
            Err(CliError::Spec {
                what: "direction spec",
                spec: String::new(),
                reason: "expected fib:L, plane:L or a file path".into(),
            })
        } else {
            Ok(DirectionSpec::File(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for DirectionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionSpec::Fibonacci(l) => write!(f, "fib:{l}"),
            DirectionSpec::Planar(l) => write!(f, "plane:{l}"),
            DirectionSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parses_cube_and_plane() {
        let g: GridSpec = "-1.5:1.5:31,-1.5:1.5:31,-1.5:1.5:31".parse().unwrap();
        assert_eq!(g.grid(), &SamplingGrid::cube(1.5, 31).unwrap());
        let p: GridSpec = "-2:2:41,-2:2:41,0:0:1".parse().unwrap();
        assert_eq!(p.grid().counts(), [41, 41, 1]);
        assert_eq!(p.to_string(), "-2:2:41,-2:2:41,0:0:1");
    }

    #[test]
    fn grid_spec_rejects_malformed() {
        for bad in ["", "0:1:2", "0:1:2,0:1:2,0:1", "0:1:x,0:1:2,0:1:2", "0:1:1,0:1:2,0:1:2", "1:0:2,0:1:2,0:1:2"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn direction_spec_round_trips() {
        for s in ["fib:10", "plane:40", "dirs.json"] {
            assert_eq!(s.parse::<DirectionSpec>().unwrap().to_string(), s);
        }
        assert!("fib:x".parse::<DirectionSpec>().is_err());
        assert!("".parse::<DirectionSpec>().is_err());
        assert_eq!(DirectionSpec::Fibonacci(10).resolve().unwrap().len(), 10);
        assert_eq!(DirectionSpec::Planar(4).resolve().unwrap().provenance(), Provenance::Planar);
    }
}
