//! Randomized drivers for the plane-counting bounds.

use dipole_core::geometry::{no_three_coplanar, DirectionSet, Vec3};
use dipole_core::oracle::{count_planes, count_planes_planar, PlaneArrangement, Subset};
use dipole_core::scene::DipoleKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn random_unit(rng: &mut ChaCha8Rng, planar: bool) -> [f64; 3] {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), if planar { 0.0 } else { rng.random_range(-1.0..1.0) });
        let n = v.norm();
        if n > 0.2 && n <= 1.0 {
            return (v * (1.0 / n)).0;
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, planar: bool) -> Vec3 {
    Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), if planar { 0.0 } else { rng.random_range(-2.0..2.0) })
}

pub fn random_arrangement(rng: &mut ChaCha8Rng, planar: bool) -> PlaneArrangement {
    loop {
        let l = rng.random_range(3..=9);
        let m = rng.random_range(1..=6);
        let dirs: Vec<[f64; 3]> = (0..l).map(|_| random_unit(rng, planar)).collect();
        let Ok(ds) = DirectionSet::explicit(&dirs) else { continue };
        if !planar && !no_three_coplanar(&ds) {
            continue;
        }
        let sources = (0..m)
            .map(|i| (random_point(rng, planar), if i % 2 == 0 { DipoleKind::Magnetic } else { DipoleKind::Electric }))
            .collect();
        if let Ok(pa) = PlaneArrangement::new(sources, ds) {
            return pa;
        }
    }
}

/// Solves `x̂_a·z = x̂_a·z_a` for three planes by Cramer's rule.
fn intersect(planes: [(Vec3, Vec3); 3]) -> Option<Vec3> {
    let [(n0, p0), (n1, p1), (n2, p2)] = planes;
    let det = n0.dot(&n1.cross(&n2));
    if det.abs() < 1e-6 {
        return None;
    }
    let b = [n0.dot(&p0), n1.dot(&p1), n2.dot(&p2)];
    let z = (n1.cross(&n2) * b[0] + n2.cross(&n0) * b[1] + n0.cross(&n1) * b[2]) * (1.0 / det);
    Some(z)
}

fn is_source(z: &Vec3, pa: &PlaneArrangement) -> bool {
    pa.sources().iter().any(|(s, _)| (*s - *z).norm() < 1e-6)
}

/// Returns the number of off-source points checked.
pub fn spatial_bound(configs: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for _ in 0..configs {
        let pa = random_arrangement(&mut rng, false);
        let m = pa.sources().len();
        let l = pa.directions().len();
        let planes: Vec<(Vec3, Vec3)> = pa
            .sources()
            .iter()
            .flat_map(|(s, _)| pa.directions().iter().map(move |d| (d.vec(), *s)))
            .collect();

        for (s, _) in pa.sources() {
            if count_planes(s, &pa, Subset::All, TOL) != l {
                return Err(format!("source count differs from L = {l}"));
            }
        }
        // Candidate maximizers: every triple-plane intersection.
        for a in 0..planes.len() {
            for b in a + 1..planes.len() {
                for c in b + 1..planes.len() {
                    let Some(z) = intersect([planes[a], planes[b], planes[c]]) else { continue };
                    if is_source(&z, &pa) {
                        continue;
                    }
                    let f = count_planes(&z, &pa, Subset::All, TOL);
                    if f > 2 * m {
                        return Err(format!("f = {f} > 2M = {}", 2 * m));
                    }
                    checked += 1;
                }
            }
        }
        // Points on the line through a source along x̂_a × x̂_b, pushed onto a
        // third plane of another source: the tightest configurations.
        for (i, (zi, _)) in pa.sources().iter().enumerate() {
            for a in 0..l {
                for b in a + 1..l {
                    let dir = pa.directions().get(a).cross(pa.directions().get(b));
                    for (j, (zj, _)) in pa.sources().iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        for x in pa.directions().iter() {
                            let denom = x.dot(&dir);
                            if denom.abs() < 1e-6 {
                                continue;
                            }
                            let t = x.dot(&(*zj - *zi)) / denom;
                            let z = *zi + dir * t;
                            if is_source(&z, &pa) {
                                continue;
                            }
                            if count_planes(&z, &pa, Subset::All, TOL) > 2 * m {
                return Err("bound 2M exceeded".into());
            }
                            checked += 1;
                        }
                    }
                }
            }
        }
        for _ in 0..20 {
            let z = random_point(&mut rng, false);
            if count_planes(&z, &pa, Subset::All, TOL) > 2 * m {
                return Err("bound 2M exceeded".into());
            }
        }
    }
    Ok(checked)
}

/// Returns the number of off-source points checked.
pub fn planar_bound(configs: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for _ in 0..configs {
        let pa = random_arrangement(&mut rng, true);
        let m = pa.sources().len();
        let l = pa.directions().len();
        for (s, _) in pa.sources() {
            if count_planes_planar(s, &pa, Subset::All, TOL).unwrap() != l {
                return Err(format!("source count differs from L = {l}"));
            }
        }
        // Intersections of any two non-parallel lines.
        let lines: Vec<(Vec3, Vec3)> = pa
            .sources()
            .iter()
            .flat_map(|(s, _)| pa.directions().iter().map(move |d| (d.vec(), *s)))
            .collect();
        for a in 0..lines.len() {
            for b in a + 1..lines.len() {
                let (n0, p0) = lines[a];
                let (n1, p1) = lines[b];
                let det = n0[0] * n1[1] - n0[1] * n1[0];
                if det.abs() < 1e-6 {
                    continue;
                }
                let (b0, b1) = (n0.dot(&p0), n1.dot(&p1));
                let z = Vec3::new((b0 * n1[1] - b1 * n0[1]) / det, (n0[0] * b1 - n1[0] * b0) / det, 0.0);
                if is_source(&z, &pa) {
                    continue;
                }
                let f = count_planes_planar(&z, &pa, Subset::All, TOL).unwrap();
                if f > m {
                    return Err(format!("f = {f} > M = {m}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

