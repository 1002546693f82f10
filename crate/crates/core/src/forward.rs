//! Electric far-field patterns of magnetic and electric dipoles, and
//! synthesis of multi-frequency measurement sets.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::geometry::{CVec3, DirectionSet, Vec3};
use crate::par::{map_range, Execution};
use crate::scene::{Dipole, DipoleKind, Scene};

/// Maximum phase advance between consecutive frequency nodes used when the
/// node count is derived from the geometry.
pub const MAX_PHASE_STEP: f64 = PI / 8.0;

/// Uniform wavenumber grid `k_j = j·k_max/N`, `j = 1..=N`. Zero is excluded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid {
    k_max: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(k_max: f64, count: usize) -> Result<Self> {
        if !(k_max > 0.0) || !k_max.is_finite() {
            return Err(invalid(format!("k_max must be positive and finite, got {k_max}")));
        }
        if count < 2 {
            return Err(invalid(format!("frequency grid needs at least 2 nodes, got {count}")));
        }
        Ok(FrequencyGrid { k_max, count })
    }

    /// Smallest grid with `Δk · max_offset <= π/8`.
    pub fn resolving(k_max: f64, max_offset: f64) -> Result<Self> {
        if !(max_offset >= 0.0) || !max_offset.is_finite() {
            return Err(invalid("offset bound must be finite and non-negative"));
        }
        let n = (k_max * max_offset / MAX_PHASE_STEP).ceil();
        let n = if n.is_finite() { (n as usize).max(2) } else { 2 };
        Self::new(k_max, n)
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        self.k_max / self.count as f64
    }

    /// Wavenumber of zero-based node `idx` (i.e. `k_{idx+1}`).
    pub fn node(&self, idx: usize) -> f64 {
        self.k_max * (idx + 1) as f64 / self.count as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.node(i))
    }
}

/// Sign of the observation direction: `+x̂` or `−x̂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Far-field samples `E^∞(σx̂_l, k_j)` for every direction, sign and node.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    directions: DirectionSet,
    grid: FrequencyGrid,
    // layout: [(l * 2 + sign) * N + j]
    samples: Vec<CVec3>,
}

impl MeasurementSet {
    pub fn from_samples(directions: DirectionSet, grid: FrequencyGrid, samples: Vec<CVec3>) -> Result<Self> {
        let expected = 2 * directions.len() * grid.count();
        if samples.len() != expected {
            return Err(invalid(format!(
                "expected {expected} samples (2·L·N), got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(MeasurementSet {
            directions,
            grid,
            samples,
        })
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[CVec3] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub(crate) fn offset(&self, l: usize, sign: Sign) -> usize {
        (l * 2 + sign.index()) * self.grid.count()
    }

    pub fn sample(&self, l: usize, sign: Sign, j: usize) -> CVec3 {
        self.samples[self.offset(l, sign) + j]
    }

    /// All frequency samples for one direction and sign.
    pub fn series(&self, l: usize, sign: Sign) -> &[CVec3] {
        let o = self.offset(l, sign);
        &self.samples[o..o + self.grid.count()]
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [CVec3] {
        &mut self.samples
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("wavenumber must be positive, got {k}")))
    }
}

#[inline]
fn prefactor(x: &Vec3, z: &Vec3, k: f64) -> Complex64 {
    Complex64::new(0.0, k / (4.0 * PI)) * Complex64::from_polar(1.0, -k * x.dot(z))
}

#[inline]
fn transverse(x: &Vec3, q: &CVec3) -> CVec3 {
    // x × (q × x) = q − (x·q) x for unit x
    let proj = q.dot_real(x);
    CVec3([q[0] - proj * x[0], q[1] - proj * x[1], q[2] - proj * x[2]])
}

#[inline]
pub(crate) fn far_field_unchecked(x: &Vec3, dipole: &Dipole, k: f64) -> CVec3 {
    let pol = match dipole.kind {
        DipoleKind::Magnetic => x.cross_c(&dipole.strength),
        DipoleKind::Electric => transverse(x, &dipole.strength),
    };
    pol.scale(prefactor(x, &dipole.location, k))
}

/// `(ik/4π) e^{−ik x̂·z} (x̂ × q)`.
pub fn far_field_mag(x: &Vec3, z: &Vec3, q: &CVec3, k: f64) -> Result<CVec3> {
    check_k(k)?;
    Ok(x.cross_c(q).scale(prefactor(x, z, k)))
}

/// `(ik/4π) e^{−ik x̂·z} x̂ × (q × x̂)`.
pub fn far_field_elec(x: &Vec3, z: &Vec3, q: &CVec3, k: f64) -> Result<CVec3> {
    check_k(k)?;
    Ok(transverse(x, q).scale(prefactor(x, z, k)))
}

/// Superposition of all dipole far fields in `scene`.
pub fn far_field_scene(x: &Vec3, k: f64, scene: &Scene) -> Result<CVec3> {
    check_k(k)?;
    Ok(scene_sum(x, k, scene))
}

fn scene_sum(x: &Vec3, k: f64, scene: &Scene) -> CVec3 {
    let mut total = CVec3::ZERO;
    for d in scene.dipoles() {
        total += far_field_unchecked(x, d, k);
    }
    total
}

pub fn simulate_measurements(scene: &Scene, ds: &DirectionSet, grid: &FrequencyGrid) -> MeasurementSet {
    simulate_measurements_with(scene, ds, grid, Execution::default())
}

/// Evaluates every `(l, σ, j)` cell independently; the result does not
/// depend on `exec`.
pub fn simulate_measurements_with(
    scene: &Scene,
    ds: &DirectionSet,
    grid: &FrequencyGrid,
    exec: Execution,
) -> MeasurementSet {
    let n = grid.count();
    let blocks = map_range(2 * ds.len(), exec, |b| {
        let (l, s) = (b / 2, Sign::BOTH[b % 2]);
        let x = ds.get(l).vec() * s.factor();
        (0..n).map(|j| scene_sum(&x, grid.node(j), scene)).collect::<Vec<_>>()
    });
    MeasurementSet {
        directions: ds.clone(),
        grid: *grid,
        samples: blocks.into_iter().flatten().collect(),
    }
}
