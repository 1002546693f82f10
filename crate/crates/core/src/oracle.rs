//! Brute-force plane counting and the direction-count checks behind the
//! uniqueness results.
//!
//! Each source `z_m` and direction `x̂_l` define a plane
//! `Π_{l,m} = {z : x̂_l·(z − z_m) = 0}`. Counting the planes through a point
//! separates sources (all `L` planes of that source pass) from other points.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{no_three_coplanar, DirectionSet, Vec3};
use crate::scene::{DipoleKind, Scene, MIN_SEPARATION};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    All,
    Magnetic,
    Electric,
}

impl Subset {
    fn admits(self, kind: DipoleKind) -> bool {
        match self {
            Subset::All => true,
            Subset::Magnetic => kind == DipoleKind::Magnetic,
            Subset::Electric => kind == DipoleKind::Electric,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlaneArrangement {
    sources: Vec<(Vec3, DipoleKind)>,
    directions: DirectionSet,
}

impl PlaneArrangement {
    pub fn new(sources: Vec<(Vec3, DipoleKind)>, directions: DirectionSet) -> Result<Self> {
        for (i, (a, _)) in sources.iter().enumerate() {
            if !a.is_finite() {
                return Err(invalid(format!("source {i} has a non-finite location")));
            }
            for (j, (b, _)) in sources.iter().enumerate().take(i) {
                if (*a - *b).norm() <= MIN_SEPARATION {
                    return Err(invalid(format!("sources {j} and {i} coincide")));
                }
            }
        }
        Ok(PlaneArrangement { sources, directions })
    }

    pub fn from_scene(scene: &Scene, directions: DirectionSet) -> Result<Self> {
        let sources = scene.dipoles().iter().map(|d| (d.location, d.kind)).collect();
        Self::new(sources, directions)
    }

    pub fn sources(&self) -> &[(Vec3, DipoleKind)] {
        &self.sources
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    /// Sources admitted by `subset`.
    pub fn source_count(&self, subset: Subset) -> usize {
        self.sources.iter().filter(|(_, k)| subset.admits(*k)).count()
    }
}

/// Number of pairs `(l, m)` in `subset` with `|x̂_l·(z − z_m)| ≤ tol`.
pub fn count_planes(z: &Vec3, pa: &PlaneArrangement, subset: Subset, tol: f64) -> usize {
    let mut count = 0;
    for (zm, kind) in &pa.sources {
        if !subset.admits(*kind) {
            continue;
        }
        let d = *z - *zm;
        count += pa.directions.iter().filter(|x| x.dot(&d).abs() <= tol).count();
    }
    count
}

/// [`count_planes`] restricted to the `x₃ = 0` plane, where each `Π_{l,m}`
/// meets the plane in a line.
pub fn count_planes_planar(z: &Vec3, pa: &PlaneArrangement, subset: Subset, tol: f64) -> Result<usize> {
    if z[2] != 0.0 {
        return Err(invalid("sampling point is out of plane"));
    }
    if let Some(i) = pa.sources.iter().position(|(s, _)| s[2] != 0.0) {
        return Err(invalid(format!("source {i} is out of plane")));
    }
    if let Some(l) = pa.directions.iter().position(|x| x[2] != 0.0) {
        return Err(invalid(format!("direction {l} is out of plane")));
    }
    Ok(count_planes(z, pa, subset, tol))
}

/// Whether a direction set meets the sufficient conditions for unique
/// recovery of `m_mag` magnetic and `m_elec` electric dipoles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionCheck {
    pub directions: usize,
    pub magnetic: usize,
    pub electric: usize,
    pub pairwise_non_collinear: bool,
    pub no_three_coplanar: bool,
    /// `L ≥ max(4M₁, 4M₂)`.
    pub spatial_count_ok: bool,
    /// `L > max(2M₁, 2M₂)`.
    pub planar_count_ok: bool,
    pub planar: bool,
}

impl DirectionCheck {
    /// Whether the theorem matching the setting applies.
    pub fn satisfied(&self) -> bool {
        if self.planar {
            self.pairwise_non_collinear && self.planar_count_ok
        } else {
            self.no_three_coplanar && self.spatial_count_ok
        }
    }

    /// Human-readable reasons the check fails; empty when satisfied.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let need = self.magnetic.max(self.electric);
        if !self.pairwise_non_collinear {
            out.push("directions are not pairwise linearly independent".to_string());
        }
        if self.planar {
            if !self.planar_count_ok {
                out.push(format!("L = {} does not exceed 2·max(M₁, M₂) = {}", self.directions, 2 * need));
            }
        } else {
            if !self.no_three_coplanar {
                out.push("some three directions are coplanar".to_string());
            }
            if !self.spatial_count_ok {
                out.push(format!("L = {} is below 4·max(M₁, M₂) = {}", self.directions, 4 * need));
            }
        }
        out
    }
}

pub fn check_directions(ds: &DirectionSet, m_mag: usize, m_elec: usize, planar: bool) -> DirectionCheck {
    let l = ds.len();
    let need = m_mag.max(m_elec);
    DirectionCheck {
        directions: l,
        magnetic: m_mag,
        electric: m_elec,
        pairwise_non_collinear: ds.pairwise_non_collinear(),
        no_three_coplanar: no_three_coplanar(ds),
        spatial_count_ok: l >= 4 * need,
        planar_count_ok: l > 2 * need,
        planar,
    }
}
