//! Subcommand bodies. Each returns a summary; `main` prints it.

use std::fmt;
use std::path::Path;

use dipole_core::forward::{simulate_measurements_with, FrequencyGrid, MeasurementSet};
use dipole_core::localization::{evaluate_field_with, IndicatorField};
use dipole_core::noise::{add_noise_with, NoiseSpec};
use dipole_core::oracle::{check_directions, DirectionCheck};
use dipole_core::pipeline::{locate_and_recover, ReconstructionReport};
use dipole_core::scene::{match_report, MatchOutcome, Scene};
use dipole_core::Execution;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::formats::{self, NoiseInfo, ReportFile, ReportMetadata};
use crate::spec::DirectionSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateSummary {
    pub directions: usize,
    pub nodes: usize,
    pub k_max: f64,
    pub delta: f64,
    pub seed: u64,
    pub rows: usize,
}

impl fmt::Display for SimulateSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L = {}, N = {}, K = {}, delta = {}, seed = {}, rows = {}",
            self.directions, self.nodes, self.k_max, self.delta, self.seed, self.rows
        )
    }
}

/// Frequency grid from the config, sized to resolve the sampling grid when
/// `nodes` is unset.
pub fn frequency_grid(cfg: &RunConfig) -> Result<FrequencyGrid> {
    let grid = cfg.grid_spec()?;
    Ok(match cfg.nodes {
        Some(n) => FrequencyGrid::new(cfg.k_max, n)?,
        None => FrequencyGrid::resolving(cfg.k_max, grid.grid().diagonal())?,
    })
}

pub fn simulate_set(cfg: &RunConfig, scene: &Scene) -> Result<MeasurementSet> {
    let ds = cfg.direction_spec()?.resolve()?;
    let freq = frequency_grid(cfg)?;
    let clean = simulate_measurements_with(scene, &ds, &freq, Execution::default());
    Ok(add_noise_with(&clean, &NoiseSpec::new(cfg.delta, cfg.seed)?, Execution::default())?)
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulateSummary> {
    let scene = formats::read_scene(cfg.require(&cfg.scene, "scene")?)?;
    let out = cfg.require(&cfg.measurements, "measurements")?;
    let ms = simulate_set(cfg, &scene)?;
    formats::write_measurements(
        out,
        &ms,
        NoiseInfo {
            delta: cfg.delta,
            seed: cfg.seed,
        },
    )?;
    Ok(SimulateSummary {
        directions: ms.directions().len(),
        nodes: ms.grid().count(),
        k_max: ms.grid().k_max(),
        delta: cfg.delta,
        seed: cfg.seed,
        rows: ms.len(),
    })
}

fn load_for_imaging(cfg: &RunConfig) -> Result<(MeasurementSet, NoiseInfo)> {
    let (ms, noise) = formats::read_measurements(cfg.require(&cfg.measurements, "measurements")?)?;
    cfg.check_bands(ms.grid().k_max())?;
    Ok((ms, noise))
}

pub fn field(cfg: &RunConfig) -> Result<IndicatorField> {
    let out = cfg.require(&cfg.field, "field")?;
    let (ms, _) = load_for_imaging(cfg)?;
    let field = evaluate_field_with(&ms, cfg.grid_spec()?.grid(), &cfg.params().imaging, Execution::default())?;
    formats::write_field(out, &field)?;
    Ok(field)
}

pub fn reconstruct(cfg: &RunConfig) -> Result<ReconstructionReport> {
    let out = cfg.require(&cfg.report, "report")?;
    let (ms, noise) = load_for_imaging(cfg)?;
    let grid = cfg.grid_spec()?;
    let params = cfg.params();
    let field = evaluate_field_with(&ms, grid.grid(), &params.imaging, Execution::default())?;
    let report = locate_and_recover(&ms, &field, &params)?;
    if let Some(path) = &cfg.field {
        formats::write_field(path, &field)?;
    }
    let metadata = ReportMetadata {
        config_hash: cfg.hash(),
        seed: noise.seed,
        delta: noise.delta,
        measurements: cfg.measurements.as_deref().map(|p| p.display().to_string()).unwrap_or_default(),
        directions: ms.directions().len(),
        provenance: ms.directions().provenance(),
        data_k_max: ms.grid().k_max(),
        nodes: ms.grid().count(),
        grid: grid.to_string(),
        cell_diagonal: grid.grid().cell_diagonal(),
        k_loc: params.imaging.k_max,
        epsilon: params.imaging.epsilon,
        rho: params.imaging.rho,
        threshold: params.threshold,
        k_strength: params.k_strength,
    };
    formats::write_report(out, &ReportFile::new(metadata, &report))?;
    Ok(report)
}

pub struct Evaluation {
    pub truth: Scene,
    pub report: ReconstructionReport,
    pub outcome: MatchOutcome,
    pub radius: f64,
}

pub const EVALUATION_HEADER: [&str; 7] = ["truth_index", "kind", "matched", "location_error", "type_correct", "strength_re", "report_index"];

impl Evaluation {
    /// One row per true dipole, in truth order.
    pub fn rows(&self) -> Vec<Vec<String>> {
        self.truth
            .dipoles()
            .iter()
            .enumerate()
            .map(|(i, d)| match self.outcome.pairs.iter().find(|p| p.truth_index == i) {
                Some(p) => vec![
                    i.to_string(),
                    d.kind.to_string(),
                    "true".into(),
                    format!("{:.6e}", p.location_error),
                    p.type_correct.to_string(),
                    p.strength_re.map_or_else(String::new, |re| format!("{re:.6e}")),
                    p.report_index.to_string(),
                ],
                None => vec![i.to_string(), d.kind.to_string(), "false".into(), String::new(), String::new(), String::new(), String::new()],
            })
            .collect()
    }

    pub fn mean_strength_re(&self) -> Option<f64> {
        let res: Vec<f64> = self.outcome.pairs.iter().filter_map(|p| p.strength_re).collect();
        (!res.is_empty()).then(|| res.iter().sum::<f64>() / res.len() as f64)
    }
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>5}  {:<8}  {:>12}  {:>5}  {:>10}", "truth", "kind", "loc error", "type", "RE")?;
        for r in self.rows() {
            if r[2] == "true" {
                let re = if r[5].is_empty() {
                    "unresolved".to_string()
                } else {
                    format!("{:.2}%", 100.0 * r[5].parse::<f64>().unwrap_or(f64::NAN))
                };
                let ok = if r[4] == "true" { "ok" } else { "WRONG" };
                writeln!(f, "{:>5}  {:<8}  {:>12}  {:>5}  {:>10}", r[0], r[1], r[3], ok, re)?;
            } else {
                writeln!(f, "{:>5}  {:<8}  {:>12}", r[0], r[1], "missed")?;
            }
        }
        let pct = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{:.2}%", 100.0 * v));
        write!(
            f,
            "matched {}/{}, missed {}, spurious {}, wrong type {}, max RE {}, mean RE {} (radius {:.4})",
            self.outcome.pairs.len(),
            self.truth.len(),
            self.outcome.missed.len(),
            self.outcome.spurious.len(),
            self.outcome.pairs.iter().filter(|p| !p.type_correct).count(),
            pct(self.outcome.max_strength_re()),
            pct(self.mean_strength_re()),
            self.radius
        )
    }
}

/// Matches a report against the true scene. The radius defaults to the
/// diagonal of one grid cell of the reconstruction.
pub fn evaluate(report: &Path, truth: &Path, radius: Option<f64>, out: Option<&Path>) -> Result<Evaluation> {
    let file = formats::read_report(report)?;
    let truth = formats::read_scene(truth)?;
    let radius = radius.unwrap_or(file.metadata.cell_diagonal);
    if !(radius > 0.0) {
        return Err(CliError::Config(format!(
            "matching radius must be positive, got {radius}; pass --radius for single-node grids"
        )));
    }
    let report = file.report();
    let outcome = match_report(&truth, &report, radius)?;
    let eval = Evaluation {
        truth,
        report,
        outcome,
        radius,
    };
    if let Some(path) = out {
        let w = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        formats::write_rows(w, &EVALUATION_HEADER, &eval.rows()).map_err(|e| CliError::parse(path, e.to_string()))?;
    }
    Ok(eval)
}

pub fn check(spec: &DirectionSpec, m_mag: usize, m_elec: usize, planar: bool) -> Result<DirectionCheck> {
    let ds = spec.resolve()?;
    Ok(check_directions(&ds, m_mag, m_elec, planar))
}

pub fn describe_check(c: &DirectionCheck) -> String {
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut s = format!(
        "L = {}, M1 = {}, M2 = {}\npairwise non-collinear: {}\nno three coplanar: {}\nL >= 4 max(M1, M2): {}\nL > 2 max(M1, M2): {}\n",
        c.directions,
        c.magnetic,
        c.electric,
        yes(c.pairwise_non_collinear),
        yes(c.no_three_coplanar),
        yes(c.spatial_count_ok),
        yes(c.planar_count_ok),
    );
    let mode = if c.planar { "planar" } else { "spatial" };
    s.push_str(&format!(
        "{mode} uniqueness conditions: {}",
        if c.satisfied() { "met" } else { "not met" }
    ));
    s
}
