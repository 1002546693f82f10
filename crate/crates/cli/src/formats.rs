//! On-disk formats: scene JSON, measurement CSV with a directions sidecar,
//! indicator field CSV and report JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dipole_core::forward::{FrequencyGrid, MeasurementSet, Sign};
use dipole_core::geometry::{CVec3, DirectionSet, Provenance, UnitVec3, Vec3};
use dipole_core::localization::IndicatorField;
use dipole_core::pipeline::{ReconstructionParams, ReconstructionReport, UnresolvedDipole};
use dipole_core::scene::{Dipole, DipoleKind, Scene};
use dipole_core::strengths::RecoveredDipole;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const MEASUREMENT_HEADER: [&str; 9] = ["dir_index", "sign", "k", "re1", "im1", "re2", "im2", "re3", "im3"];
pub const FIELD_HEADER: [&str; 7] = ["x", "y", "z", "Imag_base", "Imag_rho", "Ielec_base", "Ielec_rho"];

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

// 17 significant digits round-trip every f64.
fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleRecord {
    pub kind: DipoleKind,
    pub location: [f64; 3],
    pub strength_re: [f64; 3],
    pub strength_im: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub dipoles: Vec<DipoleRecord>,
}

impl SceneFile {
    pub fn from_scene(scene: &Scene) -> Self {
        let dipoles = scene
            .dipoles()
            .iter()
            .map(|d| DipoleRecord {
                kind: d.kind,
                location: d.location.0,
                strength_re: d.strength.re(),
                strength_im: d.strength.im(),
            })
            .collect();
        SceneFile { dipoles }
    }
}

pub fn read_scene(path: &Path) -> Result<Scene> {
    let file: SceneFile = read_json(path)?;
    let dipoles = file
        .dipoles
        .iter()
        .enumerate()
        .map(|(i, d)| {
            Dipole::new(d.kind, Vec3(d.location), CVec3::from_parts(d.strength_re, d.strength_im))
                .map_err(|e| CliError::parse(path, format!("dipoles[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Scene::new(dipoles).map_err(|e| CliError::parse(path, e.to_string()))
}

pub fn write_scene(path: &Path, scene: &Scene) -> Result<()> {
    write_json(path, &SceneFile::from_scene(scene))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseInfo {
    pub delta: f64,
    pub seed: u64,
}

/// Sidecar next to a measurement CSV. Direction `l` is `directions[l]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionsFile {
    pub provenance: Provenance,
    pub k_max: f64,
    pub count: usize,
    pub directions: Vec<[f64; 3]>,
    pub noise: NoiseInfo,
}

/// `meas.csv` keeps its directions in `meas.directions.json`.
pub fn sidecar_path(measurements: &Path) -> PathBuf {
    measurements.with_extension("directions.json")
}

pub fn write_measurements(path: &Path, ms: &MeasurementSet, noise: NoiseInfo) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let wrap = |e: csv::Error| CliError::parse(path, e.to_string());
    w.write_record(MEASUREMENT_HEADER).map_err(wrap)?;
    let grid = ms.grid();
    for l in 0..ms.directions().len() {
        for sign in Sign::BOTH {
            for (j, s) in ms.series(l, sign).iter().enumerate() {
                let mut rec = vec![l.to_string(), sign.symbol().to_string(), exact(grid.node(j))];
                for c in s.0 {
                    rec.push(exact(c.re));
                    rec.push(exact(c.im));
                }
                w.write_record(&rec).map_err(wrap)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))?;

    let sidecar = DirectionsFile {
        provenance: ms.directions().provenance(),
        k_max: grid.k_max(),
        count: grid.count(),
        directions: ms.directions().iter().map(UnitVec3::as_array).collect(),
        noise,
    };
    write_json(&sidecar_path(path), &sidecar)
}

pub fn read_measurements(path: &Path) -> Result<(MeasurementSet, NoiseInfo)> {
    let side_path = sidecar_path(path);
    let side: DirectionsFile = read_json(&side_path)?;
    let units = side
        .directions
        .iter()
        .map(|v| UnitVec3::try_new(Vec3(*v)))
        .collect::<dipole_core::Result<Vec<_>>>()
        .map_err(|e| CliError::parse(&side_path, e.to_string()))?;
    let ds = DirectionSet::new(units, side.provenance).map_err(|e| CliError::parse(&side_path, e.to_string()))?;
    let grid = FrequencyGrid::new(side.k_max, side.count).map_err(|e| CliError::parse(&side_path, e.to_string()))?;

    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::Reader::from_reader(std::io::BufReader::new(file));
    let headers = r.headers().map_err(|e| CliError::parse(path, e.to_string()))?;
    if headers.iter().ne(MEASUREMENT_HEADER) {
        return Err(CliError::parse(
            path,
            format!("header must be `{}`", MEASUREMENT_HEADER.join(",")),
        ));
    }

    let n = grid.count();
    let expected = 2 * ds.len() * n;
    let mut samples = Vec::with_capacity(expected);
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(path, e.to_string()))?;
        let line = rec.position().map_or(row + 2, |p| p.line() as usize);
        let at = |col: usize, msg: String| CliError::parse(path, format!("line {line}, column `{}`: {msg}", MEASUREMENT_HEADER[col]));
        if row >= expected {
            return Err(CliError::parse(path, format!("line {line}: more than the {expected} rows the sidecar implies")));
        }
        let (l, sign, j) = (row / (2 * n), Sign::BOTH[(row / n) % 2], row % n);
        let dir: usize = rec[0].parse().map_err(|e| at(0, format!("{e}")))?;
        if dir != l {
            return Err(at(0, format!("expected direction {l}, got {dir}")));
        }
        if rec[1] != *sign.symbol().to_string().as_str() {
            return Err(at(1, format!("expected `{}`, got `{}`", sign.symbol(), &rec[1])));
        }
        let num = |col: usize| -> Result<f64> { rec[col].trim().parse::<f64>().map_err(|e| at(col, format!("{e}"))) };
        let k = num(2)?;
        let node = grid.node(j);
        if (k - node).abs() > 1e-12 * node {
            return Err(at(2, format!("expected wavenumber {node}, got {k}")));
        }
        let mut re = [0.0; 3];
        let mut im = [0.0; 3];
        for c in 0..3 {
            re[c] = num(3 + 2 * c)?;
            im[c] = num(4 + 2 * c)?;
        }
        samples.push(CVec3::from_parts(re, im));
    }
    if samples.len() != expected {
        return Err(CliError::parse(
            path,
            format!("expected {expected} rows (2·L·N with L = {}, N = {n}), found {}", ds.len(), samples.len()),
        ));
    }
    let ms = MeasurementSet::from_samples(ds, grid, samples).map_err(|e| CliError::parse(path, e.to_string()))?;
    Ok((ms, side.noise))
}

pub fn write_field(path: &Path, field: &IndicatorField) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let wrap = |e: csv::Error| CliError::parse(path, e.to_string());
    w.write_record(FIELD_HEADER).map_err(wrap)?;
    let grid = field.grid();
    for i in 0..grid.len() {
        let p = grid.node(i);
        let mut rec: Vec<String> = p.0.iter().map(f64::to_string).collect();
        for kind in [DipoleKind::Magnetic, DipoleKind::Electric] {
            rec.push(field.base(kind)[i].to_string());
            rec.push(field.value(kind, i).to_string());
        }
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoveredRecord {
    pub kind: DipoleKind,
    pub location: [f64; 3],
    pub strength_re: [f64; 3],
    pub strength_im: [f64; 3],
    pub directions: [usize; 2],
    pub k_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnresolvedRecord {
    pub kind: DipoleKind,
    pub location: [f64; 3],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportMetadata {
    /// SHA-256 of the resolved run configuration.
    pub config_hash: String,
    pub seed: u64,
    pub delta: f64,
    pub measurements: String,
    pub directions: usize,
    pub provenance: Provenance,
    pub data_k_max: f64,
    pub nodes: usize,
    pub grid: String,
    pub cell_diagonal: f64,
    pub k_loc: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub threshold: f64,
    pub k_strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub metadata: ReportMetadata,
    pub dipoles: Vec<RecoveredRecord>,
    pub unresolved: Vec<UnresolvedRecord>,
}

impl ReportFile {
    pub fn new(metadata: ReportMetadata, report: &ReconstructionReport) -> Self {
        let dipoles = report
            .dipoles
            .iter()
            .map(|d| RecoveredRecord {
                kind: d.kind,
                location: d.location.0,
                strength_re: d.strength.re(),
                strength_im: d.strength.im(),
                directions: [d.directions.0, d.directions.1],
                k_max: d.k_max,
            })
            .collect();
        let unresolved = report
            .unresolved
            .iter()
            .map(|u| UnresolvedRecord {
                kind: u.kind,
                location: u.location.0,
                reason: u.reason.clone(),
            })
            .collect();
        ReportFile {
            metadata,
            dipoles,
            unresolved,
        }
    }

    pub fn report(&self) -> ReconstructionReport {
        ReconstructionReport {
            dipoles: self
                .dipoles
                .iter()
                .map(|d| RecoveredDipole {
                    kind: d.kind,
                    location: Vec3(d.location),
                    strength: CVec3::from_parts(d.strength_re, d.strength_im),
                    directions: (d.directions[0], d.directions[1]),
                    k_max: d.k_max,
                })
                .collect(),
            unresolved: self
                .unresolved
                .iter()
                .map(|u| UnresolvedDipole {
                    kind: u.kind,
                    location: Vec3(u.location),
                    reason: u.reason.clone(),
                })
                .collect(),
        }
    }

    pub fn params(&self) -> ReconstructionParams {
        let m = &self.metadata;
        ReconstructionParams {
            imaging: dipole_core::imaging::ImagingParams {
                k_max: m.k_loc,
                epsilon: m.epsilon,
                rho: m.rho,
            },
            k_strength: m.k_strength,
            threshold: m.threshold,
        }
    }
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    read_json(path)
}

pub fn write_report(path: &Path, report: &ReportFile) -> Result<()> {
    write_json(path, report)
}

/// Writes rows of an evaluation table.
pub fn write_rows<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
