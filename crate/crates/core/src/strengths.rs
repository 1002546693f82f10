//! Polarization-strength recovery at located positions, and the closed-form
//! single-dipole recoveries.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::forward::{far_field_mag, MeasurementSet, Sign};
use crate::geometry::{CVec3, DirectionSet, Vec3};
use crate::imaging::BandIntegrator;
use crate::scene::DipoleKind;

/// Default band limit for strength recovery.
pub const DEFAULT_K_STRENGTH: f64 = 200.0;

/// Minimum `|x̂·(z_m − z_target)|` and `|x̂ × ŷ|` for an admissible pair.
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

/// Relative tolerance for the `(1/k₋)E(k₋) ≠ (1/k₊)E(k₊)` check.
pub const NONVANISHING_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecoveredDipole {
    pub kind: DipoleKind,
    pub location: Vec3,
    #[serde(skip)]
    pub strength: CVec3,
    pub directions: (usize, usize),
    pub k_max: f64,
}

/// Chooses the admissible pair `(x̂, ŷ)` that maximizes, lexicographically,
/// the smallest separation `min(|x̂·Δ|, |ŷ·Δ|)` over `Δ = z_m − target` and
/// then `|x̂ × ŷ|`. Returned indices satisfy `i < j`; exact ties keep the
/// first pair in index order.
pub fn select_pair(target: &Vec3, others: &[Vec3], ds: &DirectionSet) -> Result<(usize, usize)> {
    if ds.len() < 2 {
        return Err(Error::NoAdmissiblePair(target.0));
    }
    let offsets: Vec<Vec3> = others.iter().map(|o| *o - *target).collect();
    let separation = |l: usize| -> f64 {
        let x = ds.get(l);
        offsets.iter().map(|d| x.dot(d).abs()).fold(f64::INFINITY, f64::min)
    };
    let seps: Vec<f64> = (0..ds.len()).map(separation).collect();

    let mut best: Option<((f64, f64), (usize, usize))> = None;
    for i in 0..ds.len() {
        if seps[i] <= ADMISSIBILITY_TOL {
            continue;
        }
        for j in i + 1..ds.len() {
            if seps[j] <= ADMISSIBILITY_TOL {
                continue;
            }
            let cross = ds.get(i).cross(ds.get(j)).norm();
            if cross <= ADMISSIBILITY_TOL {
                continue;
            }
            let key = (seps[i].min(seps[j]), cross);
            let better = match best {
                None => true,
                Some((b, _)) => key.0 > b.0 || (key.0 == b.0 && key.1 > b.1),
            };
            if better {
                best = Some((key, (i, j)));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(Error::NoAdmissiblePair(target.0))
}

fn pair_directions(ds: &DirectionSet, pair: (usize, usize)) -> Result<(Vec3, Vec3)> {
    let (i, j) = pair;
    if i >= ds.len() || j >= ds.len() {
        return Err(invalid(format!("direction pair {pair:?} out of range")));
    }
    let (x, y) = (ds.get(i).vec(), ds.get(j).vec());
    if y.cross(&x).norm() <= ADMISSIBILITY_TOL {
        return Err(invalid(format!("directions {i} and {j} are collinear")));
    }
    Ok((x, y))
}

/// Rebuilds `q` from `G_x = x̂ × q` and `G_y = ŷ × q`:
/// `q = [(ŷ×x̂)/|ŷ×x̂|² · (G_y + ŷ × (x̂ × G_x))] x̂ − x̂ × G_x`.
pub fn strength_from_cross_products(x: &Vec3, y: &Vec3, gx: &CVec3, gy: &CVec3) -> CVec3 {
    let yx = y.cross(x);
    let axial = yx.to_complex().scale_re(1.0 / yx.norm_sqr());
    let inner = *gy + y.cross_c(&x.cross_c(gx));
    let along = axial.dot(&inner);
    x.to_complex().scale(along) - x.cross_c(gx)
}

/// Rebuilds `q` from the transverse parts `P_x = x̂ × (q × x̂)` and `P_y`:
/// `q = [(ŷ×x̂)/|ŷ×x̂|² · (ŷ × P_y − ŷ × P_x)] x̂ + P_x`.
pub fn strength_from_transverse_parts(x: &Vec3, y: &Vec3, px: &CVec3, py: &CVec3) -> CVec3 {
    let yx = y.cross(x);
    let axial = yx.to_complex().scale_re(1.0 / yx.norm_sqr());
    let inner = y.cross_c(py) - y.cross_c(px);
    let along = axial.dot(&inner);
    x.to_complex().scale(along) + *px
}

/// Strength at `z` from band integrals at the two directions of `pair`.
pub fn recover_strength(integrator: &BandIntegrator, ds: &DirectionSet, kind: DipoleKind, z: &Vec3, pair: (usize, usize)) -> Result<CVec3> {
    let (x, y) = pair_directions(ds, pair)?;
    let fx = integrator.integral(z, pair.0, kind);
    let fy = integrator.integral(z, pair.1, kind);
    Ok(match kind {
        DipoleKind::Magnetic => strength_from_cross_products(&x, &y, &fx, &fy),
        DipoleKind::Electric => strength_from_transverse_parts(&x, &y, &fx, &fy),
    })
}

pub fn recover_strength_mag(z: &Vec3, pair: (usize, usize), ms: &MeasurementSet, band: f64) -> Result<CVec3> {
    pair_directions(ms.directions(), pair)?;
    let integ = BandIntegrator::new(ms, band)?;
    recover_strength(&integ, ms.directions(), DipoleKind::Magnetic, z, pair)
}

pub fn recover_strength_elec(z: &Vec3, pair: (usize, usize), ms: &MeasurementSet, band: f64) -> Result<CVec3> {
    pair_directions(ms.directions(), pair)?;
    let integ = BandIntegrator::new(ms, band)?;
    recover_strength(&integ, ms.directions(), DipoleKind::Electric, z, pair)
}

/// Upper bound on `|q − q_K|` for the dipole at `target` when the remaining
/// sources `(location, |q|)` are known, following the same-type sinc
/// estimate `|F(z*, x̂, K) − x̂×q*| ≤ (1/K) Σ |q_m| / |x̂·(z* − z_m)|`.
pub fn truncation_bound(x: &Vec3, y: &Vec3, target: &Vec3, others: &[(Vec3, f64)], band: f64) -> f64 {
    let sum = |d: &Vec3| -> f64 {
        others
            .iter()
            .map(|(z, q)| q / d.dot(&(*target - *z)).abs())
            .sum()
    };
    let c = y.cross(x).norm();
    ((1.0 + c) / c * sum(x) + sum(y) / c) / band
}

fn frequency_index(ms: &MeasurementSet, k: f64, round_up: bool) -> Result<usize> {
    let grid = ms.grid();
    let u = k / grid.step();
    let snapped = if (u - u.round()).abs() < 1e-9 * u.max(1.0) {
        u.round()
    } else if round_up {
        u.ceil()
    } else {
        u.floor()
    };
    if snapped < 1.0 || snapped > grid.count() as f64 {
        return Err(invalid(format!("wavenumber {k} lies outside the measured range")));
    }
    Ok(snapped as usize - 1)
}

/// Location of a lone magnetic dipole from the multi-frequency phase
/// ratio at three linearly independent directions. `k_lo` and `k_hi` snap
/// inward to grid nodes.
pub fn recover_single_dipole_location(
    ms: &MeasurementSet,
    triple: (usize, usize, usize),
    k_lo: f64,
    k_hi: f64,
) -> Result<Vec3> {
    let ds = ms.directions();
    let idx = [triple.0, triple.1, triple.2];
    if idx.iter().any(|&l| l >= ds.len()) {
        return Err(invalid(format!("direction triple {triple:?} out of range")));
    }
    let lo = frequency_index(ms, k_lo, true)?;
    let hi = frequency_index(ms, k_hi, false)?;
    if hi <= lo {
        return Err(invalid(format!("empty frequency window [{k_lo}, {k_hi}]")));
    }
    let grid = ms.grid();
    let (km, kp) = (grid.node(lo), grid.node(hi));

    let rows: [Vec3; 3] = idx.map(|l| ds.get(l).vec());
    let det = rows[0].dot(&rows[1].cross(&rows[2]));
    if det.abs() <= crate::geometry::DEGENERACY_TOL {
        return Err(Error::SingularSystem(det));
    }

    let mut rhs = [0.0; 3];
    for (r, &l) in idx.iter().enumerate() {
        let series = ms.series(l, Sign::Plus);
        let (em, ep) = (series[lo], series[hi]);
        let scale = (em.norm() / km).max(ep.norm() / kp);
        let gap = (em.scale_re(1.0 / km) - ep.scale_re(1.0 / kp)).norm();
        if !(scale > 0.0) || gap <= NONVANISHING_TOL * scale {
            return Err(Error::DegenerateData(format!(
                "direction {l}: (1/k)E^∞ agrees at k = {km} and {kp}; x̂×q or x̂·z vanishes"
            )));
        }
        let emc = em.conj();
        // trapezoid over nodes lo..=hi of (1/k) E(k)·conj(E(k₋))
        let mut integral = Complex64::new(0.0, 0.0);
        for j in lo..hi {
            let (ka, kb) = (grid.node(j), grid.node(j + 1));
            let ga = series[j].dot(&emc) / ka;
            let gb = series[j + 1].dot(&emc) / kb;
            integral += (ga + gb) * (0.5 * (kb - ka));
        }
        let num = ep.dot(&emc) * km - em.dot(&emc) * kp;
        let val = Complex64::i() * num / (integral * (kp * km));
        rhs[r] = val.re;
    }

    // Cramer's rule for rows · z = rhs
    let col = |c: usize| Vec3::new(rows[0][c], rows[1][c], rows[2][c]);
    let (c0, c1, c2) = (col(0), col(1), col(2));
    let b = Vec3(rhs);
    Ok(Vec3::new(
        b.dot(&c1.cross(&c2)) / det,
        c0.dot(&b.cross(&c2)) / det,
        c0.dot(&c1.cross(&b)) / det,
    ))
}

/// Strength of a lone magnetic dipole at known `z` from one wavenumber node
/// `j` (zero-based) and two directions. The result is re-simulated at both
/// directions; a relative mismatch above `consistency_tol` is reported as
/// degenerate data.
pub fn recover_single_dipole_strength_fixed_k(
    z: &Vec3,
    pair: (usize, usize),
    ms: &MeasurementSet,
    j: usize,
    consistency_tol: f64,
) -> Result<CVec3> {
    let (x, y) = pair_directions(ms.directions(), pair)?;
    if j >= ms.grid().count() {
        return Err(invalid(format!("frequency index {j} out of range")));
    }
    let k = ms.grid().node(j);
    let ex = ms.sample(pair.0, Sign::Plus, j);
    let ey = ms.sample(pair.1, Sign::Plus, j);
    let data_norm = (ex.norm_sqr() + ey.norm_sqr()).sqrt();
    if data_norm == 0.0 {
        return Err(Error::DegenerateData("far field vanishes at both directions".into()));
    }
    // x̂ × q = (4π/ik) e^{ik x̂·z} E^∞(x̂, k)
    let unphase = |d: &Vec3, e: &CVec3| {
        e.scale(Complex64::new(0.0, -4.0 * PI / k) * Complex64::from_polar(1.0, k * d.dot(z)))
    };
    let q = strength_from_cross_products(&x, &y, &unphase(&x, &ex), &unphase(&y, &ey));

    let rx = far_field_mag(&x, z, &q, k)? - ex;
    let ry = far_field_mag(&y, z, &q, k)? - ey;
    let mismatch = (rx.norm_sqr() + ry.norm_sqr()).sqrt() / data_norm;
    if !(mismatch <= consistency_tol) {
        return Err(Error::DegenerateData(format!(
            "recovered strength reproduces the data only to relative error {mismatch:e}"
        )));
    }
    Ok(q)
}
