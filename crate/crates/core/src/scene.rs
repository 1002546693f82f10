//! Ground-truth dipole configurations and truth-vs-reconstruction metrics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{CVec3, Vec3};
use crate::pipeline::ReconstructionReport;

/// Minimum separation between two dipoles of one scene.
pub const MIN_SEPARATION: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleKind {
    Magnetic,
    Electric,
}

impl fmt::Display for DipoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DipoleKind::Magnetic => "magnetic",
            DipoleKind::Electric => "electric",
        })
    }
}

/// A point source. Only the product `q = τp` is observable, so strength and
/// polarization are stored together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dipole {
    pub kind: DipoleKind,
    pub location: Vec3,
    pub strength: CVec3,
}

impl Dipole {
    pub fn new(kind: DipoleKind, location: Vec3, strength: CVec3) -> Result<Self> {
        if !location.is_finite() || !strength.is_finite() {
            return Err(invalid("dipole location and strength must be finite"));
        }
        if strength.norm() == 0.0 {
            return Err(invalid(format!(
                "dipole at {:?} has zero polarization strength",
                location.0
            )));
        }
        Ok(Dipole {
            kind,
            location,
            strength,
        })
    }

    pub fn magnetic(location: [f64; 3], re: [f64; 3], im: [f64; 3]) -> Result<Self> {
        Self::new(DipoleKind::Magnetic, Vec3(location), CVec3::from_parts(re, im))
    }

    pub fn electric(location: [f64; 3], re: [f64; 3], im: [f64; 3]) -> Result<Self> {
        Self::new(DipoleKind::Electric, Vec3(location), CVec3::from_parts(re, im))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    dipoles: Vec<Dipole>,
}

impl Scene {
    pub fn new(dipoles: Vec<Dipole>) -> Result<Self> {
        for i in 0..dipoles.len() {
            for j in i + 1..dipoles.len() {
                let d = (dipoles[i].location - dipoles[j].location).norm();
                if d <= MIN_SEPARATION {
                    return Err(invalid(format!(
                        "dipoles {i} and {j} share location {:?}",
                        dipoles[i].location.0
                    )));
                }
            }
        }
        Ok(Scene { dipoles })
    }

    pub fn empty() -> Self {
        Scene::default()
    }

    pub fn dipoles(&self) -> &[Dipole] {
        &self.dipoles
    }

    pub fn len(&self) -> usize {
        self.dipoles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dipoles.is_empty()
    }

    pub fn count(&self, kind: DipoleKind) -> usize {
        self.dipoles.iter().filter(|d| d.kind == kind).count()
    }

    pub fn of_kind(&self, kind: DipoleKind) -> impl Iterator<Item = &Dipole> {
        self.dipoles.iter().filter(move |d| d.kind == kind)
    }
}

/// `|q_rec − q_true| / |q_true|` over the six real components.
pub fn relative_error(q_true: &CVec3, q_rec: &CVec3) -> Result<f64> {
    let denom = q_true.norm();
    if denom == 0.0 {
        return Err(invalid("relative error undefined for zero reference strength"));
    }
    Ok((*q_rec - *q_true).norm() / denom)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchedPair {
    pub truth_index: usize,
    /// Index into [`ReconstructionReport::located`] order.
    pub report_index: usize,
    pub location_error: f64,
    pub type_correct: bool,
    /// `None` when the reconstruction carries no strength.
    pub strength_re: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MatchOutcome {
    pub pairs: Vec<MatchedPair>,
    pub missed: Vec<usize>,
    pub spurious: Vec<usize>,
}

impl MatchOutcome {
    pub fn max_strength_re(&self) -> Option<f64> {
        self.pairs
            .iter()
            .filter_map(|p| p.strength_re)
            .fold(None, |acc, re| Some(acc.map_or(re, |a: f64| a.max(re))))
    }

    pub fn all_matched_cleanly(&self) -> bool {
        self.missed.is_empty()
            && self.spurious.is_empty()
            && self.pairs.iter().all(|p| p.type_correct)
    }
}

/// Greedy nearest-neighbour pairing of truth and reconstruction within
/// `radius`. Candidate pairs are taken in order of increasing distance; ties
/// resolve by truth index, then report index.
pub fn match_report(truth: &Scene, report: &ReconstructionReport, radius: f64) -> Result<MatchOutcome> {
    if !(radius > 0.0) {
        return Err(invalid("matching radius must be positive"));
    }
    let located = report.located();
    let mut candidates = Vec::new();
    for (ti, t) in truth.dipoles().iter().enumerate() {
        for (ri, r) in located.iter().enumerate() {
            let d = (t.location - r.location).norm();
            if d <= radius {
                candidates.push((d, ti, ri));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut truth_used = vec![false; truth.len()];
    let mut rec_used = vec![false; located.len()];
    let mut pairs = Vec::new();
    for (d, ti, ri) in candidates {
        if truth_used[ti] || rec_used[ri] {
            continue;
        }
        truth_used[ti] = true;
        rec_used[ri] = true;
        let t = &truth.dipoles()[ti];
        let r = &located[ri];
        let strength_re = match r.strength {
            Some(q) => Some(relative_error(&t.strength, &q)?),
            None => None,
        };
        pairs.push(MatchedPair {
            truth_index: ti,
            report_index: ri,
            location_error: d,
            type_correct: t.kind == r.kind,
            strength_re,
        });
    }
    pairs.sort_by_key(|p| p.truth_index);
    Ok(MatchOutcome {
        pairs,
        missed: (0..truth.len()).filter(|&i| !truth_used[i]).collect(),
        spurious: (0..located.len()).filter(|&i| !rec_used[i]).collect(),
    })
}
