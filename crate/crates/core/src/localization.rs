//! Indicator evaluation on rectangular sampling grids and peak extraction.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Vec3;
use crate::imaging::{BandIntegrator, ImagingParams};
use crate::forward::MeasurementSet;
use crate::par::{map_range, Execution};
use crate::scene::DipoleKind;

/// Default peak threshold on the un-sharpened indicator: a strict majority
/// of directions must vote.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Axis-aligned lattice of sampling points. An axis with a single node must
/// have equal lower and upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    lower: Vec3,
    upper: Vec3,
    counts: [usize; 3],
}

impl SamplingGrid {
    pub fn new(lower: Vec3, upper: Vec3, counts: [usize; 3]) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(invalid("grid corners must be finite"));
        }
        for a in 0..3 {
            if counts[a] == 0 {
                return Err(invalid(format!("axis {a} has zero nodes")));
            }
            if upper[a] < lower[a] {
                return Err(invalid(format!("axis {a}: upper bound below lower bound")));
            }
            if counts[a] == 1 && upper[a] != lower[a] {
                return Err(invalid(format!(
                    "axis {a} has one node but distinct bounds {} and {}",
                    lower[a], upper[a]
                )));
            }
        }
        Ok(SamplingGrid { lower, upper, counts })
    }

    /// Cube `[-c, c]³` with `n` nodes per axis.
    pub fn cube(half_width: f64, n: usize) -> Result<Self> {
        Self::new(Vec3::new(-half_width, -half_width, -half_width), Vec3::new(half_width, half_width, half_width), [n; 3])
    }

    /// Square `[-c, c]²` in the plane `z³ = 0` with `n × n` nodes.
    pub fn square_xy(half_width: f64, n: usize) -> Result<Self> {
        Self::new(Vec3::new(-half_width, -half_width, 0.0), Vec3::new(half_width, half_width, 0.0), [n, n, 1])
    }

    pub fn lower(&self) -> Vec3 {
        self.lower
    }

    pub fn upper(&self) -> Vec3 {
        self.upper
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if self.counts[axis] < 2 {
            0.0
        } else {
            (self.upper[axis] - self.lower[axis]) / (self.counts[axis] - 1) as f64
        }
    }

    /// Length of one cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        (0..3).map(|a| self.spacing(a).powi(2)).sum::<f64>().sqrt()
    }

    /// Length of the whole box diagonal.
    pub fn diagonal(&self) -> f64 {
        (self.upper - self.lower).norm()
    }

    /// Lexicographic index, x slowest.
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.counts[1] + iy) * self.counts[2] + iz
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let iz = idx % self.counts[2];
        let rest = idx / self.counts[2];
        [rest / self.counts[1], rest % self.counts[1], iz]
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.counts[axis];
        if n < 2 {
            self.lower[axis]
        } else {
            self.lower[axis] + (self.upper[axis] - self.lower[axis]) * i as f64 / (n - 1) as f64
        }
    }

    pub fn node(&self, idx: usize) -> Vec3 {
        let [ix, iy, iz] = self.unravel(idx);
        Vec3::new(self.coord(0, ix), self.coord(1, iy), self.coord(2, iz))
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Indices of the (up to 26) in-range neighbours of `idx`.
    pub fn neighbours(&self, idx: usize) -> Vec<usize> {
        let c = self.unravel(idx);
        let mut out = Vec::with_capacity(26);
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dz in -1i64..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                    if (0..3).all(|a| n[a] >= 0 && n[a] < self.counts[a] as i64) {
                        out.push(self.index(n[0] as usize, n[1] as usize, n[2] as usize));
                    }
                }
            }
        }
        out
    }

    /// Nearest node to `p` (clamped to the box).
    pub fn nearest_index(&self, p: &Vec3) -> usize {
        let i: [usize; 3] = std::array::from_fn(|a| {
            let h = self.spacing(a);
            if h == 0.0 {
                0
            } else {
                (((p[a] - self.lower[a]) / h).round().max(0.0) as usize).min(self.counts[a] - 1)
            }
        });
        self.index(i[0], i[1], i[2])
    }
}

/// Indicator samples on a grid. Values are stored before sharpening; the
/// sharpened value is `base^ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField {
    grid: SamplingGrid,
    rho: f64,
    mag_base: Vec<f64>,
    elec_base: Vec<f64>,
}

impl IndicatorField {
    pub fn from_base(grid: SamplingGrid, rho: f64, mag_base: Vec<f64>, elec_base: Vec<f64>) -> Result<Self> {
        if mag_base.len() != grid.len() || elec_base.len() != grid.len() {
            return Err(invalid("indicator value count does not match grid"));
        }
        if mag_base.iter().chain(&elec_base).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid("indicator values must lie in [0, 1]"));
        }
        Ok(IndicatorField {
            grid,
            rho,
            mag_base,
            elec_base,
        })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn base(&self, kind: DipoleKind) -> &[f64] {
        match kind {
            DipoleKind::Magnetic => &self.mag_base,
            DipoleKind::Electric => &self.elec_base,
        }
    }

    pub fn value(&self, kind: DipoleKind, idx: usize) -> f64 {
        self.base(kind)[idx].powf(self.rho)
    }

    pub fn values(&self, kind: DipoleKind) -> Vec<f64> {
        self.base(kind).iter().map(|v| v.powf(self.rho)).collect()
    }
}

pub fn evaluate_field(ms: &MeasurementSet, grid: &SamplingGrid, params: &ImagingParams) -> Result<IndicatorField> {
    evaluate_field_with(ms, grid, params, Execution::default())
}

pub fn evaluate_field_with(
    ms: &MeasurementSet,
    grid: &SamplingGrid,
    params: &ImagingParams,
    exec: Execution,
) -> Result<IndicatorField> {
    params.validate()?;
    let integrator = BandIntegrator::new(ms, params.k_max)?;
    let votes = map_range(grid.len(), exec, |i| integrator.vote_fractions(&grid.node(i), params.epsilon));
    let (mag, elec) = votes.into_iter().unzip();
    IndicatorField::from_base(*grid, params.rho, mag, elec)
}

/// Base indicator values `(magnetic, electric)` at arbitrary points.
pub fn evaluate_points(
    ms: &MeasurementSet,
    points: &[Vec3],
    params: &ImagingParams,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    let integrator = BandIntegrator::new(ms, params.k_max)?;
    Ok(map_range(points.len(), exec, |i| integrator.vote_fractions(&points[i], params.epsilon)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub location: Vec3,
    /// Sharpened indicator value.
    pub value: f64,
}

/// Grid nodes whose base indicator exceeds `threshold` and is maximal over
/// the 26-neighbourhood. On plateaus only the lowest index survives. Sorted
/// by descending value, then index.
pub fn extract_peaks(field: &IndicatorField, kind: DipoleKind, threshold: f64) -> Result<Vec<Peak>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(invalid(format!("peak threshold must lie in (0, 1], got {threshold}")));
    }
    let grid = field.grid();
    let base = field.base(kind);
    let mut peaks: Vec<Peak> = (0..grid.len())
        .filter(|&i| base[i] > threshold)
        .filter(|&i| {
            grid.neighbours(i)
                .into_iter()
                .all(|n| base[i] > base[n] || (base[i] == base[n] && i < n))
        })
        .map(|i| Peak {
            index: i,
            location: grid.node(i),
            value: field.value(kind, i),
        })
        .collect();
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_with(grid: SamplingGrid, mag: Vec<f64>) -> IndicatorField {
        let elec = vec![0.0; grid.len()];
        IndicatorField::from_base(grid, 4.0, mag, elec).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = SamplingGrid::cube(1.5, 31).unwrap();
        assert_eq!(g.len(), 29791);
        assert!((g.spacing(0) - 0.1).abs() < 1e-15);
        let idx = g.index(5, 15, 25);
        assert_eq!(g.unravel(idx), [5, 15, 25]);
        let p = g.node(idx);
        assert!((p[0] + 1.0).abs() < 1e-15 && p[1].abs() < 1e-15 && (p[2] - 1.0).abs() < 1e-15);
        assert_eq!(g.nearest_index(&Vec3::new(-1.02, 0.03, 0.98)), idx);
        assert_eq!(g.neighbours(idx).len(), 26);
        assert_eq!(g.neighbours(0).len(), 7);

        let sq = SamplingGrid::square_xy(2.0, 41).unwrap();
        assert_eq!(sq.neighbours(sq.index(10, 10, 0)).len(), 8);
        assert!(SamplingGrid::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), [2, 2, 1]).is_err());
        assert!(SamplingGrid::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0), [2, 0, 1]).is_err());
        assert!(SamplingGrid::new(Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO, [2, 2, 2]).is_err());
        assert_eq!(SamplingGrid::new(Vec3::ZERO, Vec3::ZERO, [1, 1, 1]).unwrap().len(), 1);
    }

    #[test]
    fn single_spike_is_the_only_peak() {
        let g = SamplingGrid::cube(1.0, 5).unwrap();
        let mut v = vec![0.0; g.len()];
        let spike = g.index(1, 3, 2);
        v[spike] = 1.0;
        let peaks = extract_peaks(&field_with(g, v), DipoleKind::Magnetic, 0.5).unwrap();
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].index, spike);
        assert_eq!(peaks[0].value, 1.0);
    }

    #[test]
    fn uniform_zero_has_no_peaks() {
        let g = SamplingGrid::cube(1.0, 4).unwrap();
        let f = field_with(g, vec![0.0; g.len()]);
        assert!(extract_peaks(&f, DipoleKind::Magnetic, 0.5).unwrap().is_empty());
        assert!(extract_peaks(&f, DipoleKind::Magnetic, 0.0).is_err());
        assert!(extract_peaks(&f, DipoleKind::Magnetic, 1.5).is_err());
    }

    #[test]
    fn plateau_keeps_lowest_index_and_sorting() {
        let g = SamplingGrid::square_xy(1.0, 7).unwrap();
        let mut v = vec![0.0; g.len()];
        let a = g.index(1, 1, 0);
        let b = g.index(1, 2, 0);
        let c = g.index(5, 5, 0);
        v[a] = 0.8;
        v[b] = 0.8;
        v[c] = 0.9;
        let peaks = extract_peaks(&field_with(g, v.clone()), DipoleKind::Magnetic, 0.5).unwrap();
        let idx: Vec<usize> = peaks.iter().map(|p| p.index).collect();
        assert_eq!(idx, vec![c, a]);

        // thresholding acts on the base value, not the sharpened one
        let peaks = extract_peaks(&field_with(g, v), DipoleKind::Magnetic, 0.85).unwrap();
        assert_eq!(peaks.len(), 1);
    }

    #[test]
    fn peaks_invariant_under_monotone_transform() {
        let g = SamplingGrid::square_xy(1.0, 9).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|i| ((i * 37 % 11) as f64) / 10.0).collect();
        let w: Vec<f64> = v.iter().map(|x| x * x * x).collect();
        let a: Vec<usize> = extract_peaks(&field_with(g, v), DipoleKind::Magnetic, 0.5).unwrap().iter().map(|p| p.index).collect();
        let b: Vec<usize> = extract_peaks(&field_with(g, w), DipoleKind::Magnetic, 0.125).unwrap().iter().map(|p| p.index).collect();
        assert_eq!(a, b);
    }
}
