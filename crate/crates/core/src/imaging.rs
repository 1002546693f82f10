//! Band-limited decoupling integrals and the thresholded indicators that
//! separate magnetic from electric dipoles.
//!
//! For a sampling point `z` and direction `x̂`,
//!
//! ```text
//! F_±(z, x̂, K) = (2π/K) ∫₀^K (1/ik) [e^{ik x̂·z} E^∞(x̂,k) ∓ e^{−ik x̂·z} E^∞(−x̂,k)] dk
//! ```
//!
//! with the minus sign for the magnetic integral and the plus sign for the
//! electric one. The integral is taken over the piecewise-linear interpolant
//! of the sampled integrand (composite trapezoid), extended as a constant on
//! `[0, k₁)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::forward::{FrequencyGrid, MeasurementSet, Sign};
use crate::geometry::{CVec3, Vec3};
use crate::scene::DipoleKind;

/// Default localization band limit.
pub const DEFAULT_K_LOC: f64 = 100.0;
/// Default cut-off on `|F|`.
pub const DEFAULT_EPSILON: f64 = 0.2;
/// Default sharpening exponent.
pub const DEFAULT_RHO: f64 = 4.0;

// Phase recurrence is re-anchored to an exact exponential at this interval.
const PHASE_REANCHOR: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ImagingParams {
    pub k_max: f64,
    pub epsilon: f64,
    pub rho: f64,
}

impl Default for ImagingParams {
    fn default() -> Self {
        ImagingParams {
            k_max: DEFAULT_K_LOC,
            epsilon: DEFAULT_EPSILON,
            rho: DEFAULT_RHO,
        }
    }
}

impl ImagingParams {
    pub fn new(k_max: f64, epsilon: f64, rho: f64) -> Result<Self> {
        let p = ImagingParams { k_max, epsilon, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > 0.0) || !self.k_max.is_finite() {
            return Err(invalid(format!("band limit K must be positive, got {}", self.k_max)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(invalid(format!("cut-off must be positive, got {}", self.epsilon)));
        }
        if !(self.rho >= 1.0) || !self.rho.is_finite() {
            return Err(invalid(format!("sharpening exponent must be >= 1, got {}", self.rho)));
        }
        Ok(())
    }
}

/// Weights `w_j` such that `Σ_j w_j g(k_j)` integrates the piecewise-linear
/// interpolant of `g` over `[0, K]`, constant on `[0, k₁)`. `K` need not be a
/// node but must not exceed the grid's `k_max`.
pub fn band_weights(grid: &FrequencyGrid, band: f64) -> Result<Vec<f64>> {
    if !(band > 0.0) || !band.is_finite() {
        return Err(invalid(format!("band limit must be positive, got {band}")));
    }
    let step = grid.step();
    let n = grid.count();
    let mut u = band / step;
    if (u - u.round()).abs() < 1e-9 * u.max(1.0) {
        u = u.round();
    }
    if u > n as f64 {
        return Err(invalid(format!(
            "band limit {band} exceeds the measured range k_max = {}",
            grid.k_max()
        )));
    }
    if u <= 1.0 {
        return Ok(vec![band]);
    }
    let full = u.floor() as usize; // nodes k_1..k_full lie in [0, K]
    let t = u - full as f64;
    let len = if t > 0.0 { full + 1 } else { full };
    let mut w = vec![0.0; len];
    w[0] += step;
    for a in 0..full - 1 {
        w[a] += 0.5 * step;
        w[a + 1] += 0.5 * step;
    }
    if t > 0.0 {
        w[full - 1] += step * t * (1.0 - 0.5 * t);
        w[full] += step * 0.5 * t * t;
    }
    Ok(w)
}

/// `1` if `t > ε`, else `0`.
pub fn cutoff(t: f64, epsilon: f64) -> u8 {
    u8::from(t > epsilon)
}

/// Precomputed frequency kernels for fast band-integral evaluation at many
/// sampling points.
#[derive(Clone, Debug)]
pub struct BandIntegrator {
    band: f64,
    step: f64,
    directions: Vec<Vec3>,
    // Per direction: weighted (2π/K) w_j E^∞(±x̂, k_j)/(ik_j).
    plus: Vec<Vec<CVec3>>,
    minus: Vec<Vec<CVec3>>,
}

impl BandIntegrator {
    pub fn new(ms: &MeasurementSet, band: f64) -> Result<Self> {
        let grid = ms.grid();
        let weights = band_weights(grid, band)?;
        let norm = 2.0 * PI / band;
        let coeffs: Vec<Complex64> = weights
            .iter()
            .enumerate()
            .map(|(j, w)| Complex64::new(0.0, -norm * w / grid.node(j)))
            .collect();
        let weigh = |series: &[CVec3]| -> Vec<CVec3> {
            coeffs.iter().zip(series).map(|(c, e)| e.scale(*c)).collect()
        };
        let lcount = ms.directions().len();
        Ok(BandIntegrator {
            band,
            step: grid.step(),
            directions: ms.directions().iter().map(|d| d.vec()).collect(),
            plus: (0..lcount).map(|l| weigh(ms.series(l, Sign::Plus))).collect(),
            minus: (0..lcount).map(|l| weigh(ms.series(l, Sign::Minus))).collect(),
        })
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn direction_count(&self) -> usize {
        self.directions.len()
    }

    /// Returns `(Σ e^{ik s} A_j, Σ e^{−ik s} B_j)` for `s = x̂_l · z`.
    fn phased_sums(&self, z: &Vec3, l: usize) -> (CVec3, CVec3) {
        let s = self.directions[l].dot(z);
        let a = &self.plus[l];
        let b = &self.minus[l];
        let rot = Complex64::from_polar(1.0, self.step * s);
        let mut p = [Complex64::new(0.0, 0.0); 3];
        let mut q = [Complex64::new(0.0, 0.0); 3];
        let mut phase = rot;
        for j in 0..a.len() {
            if j % PHASE_REANCHOR == 0 {
                phase = Complex64::from_polar(1.0, self.step * (j + 1) as f64 * s);
            }
            let back = phase.conj();
            for c in 0..3 {
                p[c] += phase * a[j].0[c];
                q[c] += back * b[j].0[c];
            }
            phase *= rot;
        }
        (CVec3(p), CVec3(q))
    }

    /// `(F_mag, F_elec)` at `z` for direction `l`.
    pub fn integrals(&self, z: &Vec3, l: usize) -> (CVec3, CVec3) {
        let (p, q) = self.phased_sums(z, l);
        (p - q, p + q)
    }

    pub fn mag(&self, z: &Vec3, l: usize) -> CVec3 {
        self.integrals(z, l).0
    }

    pub fn elec(&self, z: &Vec3, l: usize) -> CVec3 {
        self.integrals(z, l).1
    }

    pub fn integral(&self, z: &Vec3, l: usize, kind: DipoleKind) -> CVec3 {
        match kind {
            DipoleKind::Magnetic => self.mag(z, l),
            DipoleKind::Electric => self.elec(z, l),
        }
    }

    /// Fractions of directions with `|F| > ε`, `(magnetic, electric)`,
    /// before sharpening.
    pub fn vote_fractions(&self, z: &Vec3, epsilon: f64) -> (f64, f64) {
        let (mut vm, mut ve) = (0u32, 0u32);
        for l in 0..self.directions.len() {
            let (fm, fe) = self.integrals(z, l);
            vm += u32::from(cutoff(fm.norm(), epsilon));
            ve += u32::from(cutoff(fe.norm(), epsilon));
        }
        let n = self.directions.len() as f64;
        (f64::from(vm) / n, f64::from(ve) / n)
    }
}

fn check_direction(ms: &MeasurementSet, l: usize) -> Result<()> {
    if l >= ms.directions().len() {
        return Err(invalid(format!(
            "direction index {l} out of range (L = {})",
            ms.directions().len()
        )));
    }
    Ok(())
}

pub fn band_integral_mag(z: &Vec3, l: usize, ms: &MeasurementSet, band: f64) -> Result<CVec3> {
    check_direction(ms, l)?;
    Ok(BandIntegrator::new(ms, band)?.mag(z, l))
}

pub fn band_integral_elec(z: &Vec3, l: usize, ms: &MeasurementSet, band: f64) -> Result<CVec3> {
    check_direction(ms, l)?;
    Ok(BandIntegrator::new(ms, band)?.elec(z, l))
}

/// `[(1/L) Σ_l T_ε(|F(z, x̂_l, K)|)]^ρ`.
pub fn indicator(z: &Vec3, ms: &MeasurementSet, params: &ImagingParams, kind: DipoleKind) -> Result<f64> {
    params.validate()?;
    let integrator = BandIntegrator::new(ms, params.k_max)?;
    let (m, e) = integrator.vote_fractions(z, params.epsilon);
    let base = match kind {
        DipoleKind::Magnetic => m,
        DipoleKind::Electric => e,
    };
    Ok(base.powf(params.rho))
}

/// Conservative bound on the quadrature error of a band integral whose
/// integrand phases satisfy `|x̂·(z − z_m)| <= max_offset` and whose total
/// source strength is `total_strength = Σ|q_m|`.
pub fn quadrature_tolerance(grid: &FrequencyGrid, band: f64, max_offset: f64, total_strength: f64) -> f64 {
    let step = grid.step();
    total_strength * step * step * (max_offset * max_offset / 12.0 + max_offset / (2.0 * band))
}
