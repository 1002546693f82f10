//! Real and complex 3-vectors and observation direction sets.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance on cross and triple products when testing collinearity and
/// coplanarity of direction sets.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Allowed deviation from unit norm.
pub const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn to_complex(self) -> CVec3 {
        CVec3(self.0.map(|c| Complex64::new(c, 0.0)))
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3(self.0.map(|c| c * rhs))
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3(a)
    }
}

/// Complex 3-vector. Products with real vectors are bilinear (no conjugation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec3(pub [Complex64; 3]);

impl Default for CVec3 {
    fn default() -> Self {
        CVec3::ZERO
    }
}

impl CVec3 {
    pub const ZERO: CVec3 = CVec3([Complex64::new(0.0, 0.0); 3]);

    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        CVec3([x, y, z])
    }

    pub fn from_parts(re: [f64; 3], im: [f64; 3]) -> Self {
        CVec3([
            Complex64::new(re[0], im[0]),
            Complex64::new(re[1], im[1]),
            Complex64::new(re[2], im[2]),
        ])
    }

    pub fn re(&self) -> [f64; 3] {
        self.0.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 3] {
        self.0.map(|c| c.im)
    }

    pub fn scale(&self, s: Complex64) -> CVec3 {
        CVec3(self.0.map(|c| c * s))
    }

    pub fn scale_re(&self, s: f64) -> CVec3 {
        CVec3(self.0.map(|c| c * s))
    }

    pub fn conj(&self) -> CVec3 {
        CVec3(self.0.map(|c| c.conj()))
    }

    /// Bilinear dot product `Σ a_i b_i`.
    pub fn dot(&self, other: &CVec3) -> Complex64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Hermitian product `Σ a_i conj(b_i)`.
    pub fn dot_conj(&self, other: &CVec3) -> Complex64 {
        self.dot(&other.conj())
    }

    pub fn dot_real(&self, v: &Vec3) -> Complex64 {
        self.0[0] * v.0[0] + self.0[1] * v.0[1] + self.0[2] * v.0[2]
    }

    pub fn cross(&self, other: &CVec3) -> CVec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        CVec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    /// `self × v` for a real right-hand side.
    pub fn cross_real(&self, v: &Vec3) -> CVec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = v.0;
        CVec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    /// Euclidean norm over the six real components.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Index<usize> for CVec3 {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, rhs: CVec3) -> CVec3 {
        CVec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl AddAssign for CVec3 {
    fn add_assign(&mut self, rhs: CVec3) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, rhs: CVec3) -> CVec3 {
        CVec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3(self.0.map(|c| -c))
    }
}

impl Vec3 {
    /// `self × q` for a complex right-hand side.
    pub fn cross_c(&self, q: &CVec3) -> CVec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = q.0;
        CVec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }
}

/// A point of the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    /// Accepts `v` only if its norm is within [`UNIT_NORM_TOL`] of one.
    pub fn try_new(v: Vec3) -> Result<Self> {
        if !v.is_finite() {
            return Err(invalid(format!("direction {:?} is not finite", v.0)));
        }
        let n = v.norm();
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(invalid(format!("direction {:?} has norm {n}, expected 1", v.0)));
        }
        Ok(UnitVec3(v))
    }

    /// Keeps vectors that are already unit within tolerance bit-for-bit and
    /// rescales everything else.
    pub fn normalize(v: Vec3) -> Result<Self> {
        if let Ok(u) = Self::try_new(v) {
            return Ok(u);
        }
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid(format!("cannot normalize direction {:?}", v.0)));
        }
        Ok(UnitVec3(v * (1.0 / n)))
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0 .0
    }
}

impl std::ops::Deref for UnitVec3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Fibonacci,
    Planar,
    Explicit,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Fibonacci => "fibonacci",
            Provenance::Planar => "planar",
            Provenance::Explicit => "explicit",
        };
        f.write_str(s)
    }
}

/// Ordered, index-addressable observation directions.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    directions: Vec<UnitVec3>,
    provenance: Provenance,
}

impl DirectionSet {
    /// Validates non-emptiness, pairwise non-collinearity and, for planar
    /// sets, a vanishing third component.
    pub fn new(directions: Vec<UnitVec3>, provenance: Provenance) -> Result<Self> {
        if directions.is_empty() {
            return Err(invalid("direction set must contain at least one direction"));
        }
        if provenance == Provenance::Planar {
            if let Some((l, d)) = directions.iter().enumerate().find(|(_, d)| d[2] != 0.0) {
                return Err(invalid(format!(
                    "planar direction {l} has third component {}",
                    d[2]
                )));
            }
        }
        let ds = DirectionSet {
            directions,
            provenance,
        };
        if let Some((i, j)) = ds.first_collinear_pair() {
            return Err(invalid(format!("directions {i} and {j} are collinear")));
        }
        Ok(ds)
    }

    /// Builds an explicit set from raw vectors, normalizing as needed.
    pub fn explicit(vectors: &[[f64; 3]]) -> Result<Self> {
        let dirs = vectors
            .iter()
            .map(|v| UnitVec3::normalize(Vec3(*v)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dirs, Provenance::Explicit)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn get(&self, l: usize) -> &UnitVec3 {
        &self.directions[l]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UnitVec3> {
        self.directions.iter()
    }

    pub fn directions(&self) -> &[UnitVec3] {
        &self.directions
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn first_collinear_pair(&self) -> Option<(usize, usize)> {
        let d = &self.directions;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if d[i].cross(&d[j]).norm() <= DEGENERACY_TOL {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn pairwise_non_collinear(&self) -> bool {
        self.first_collinear_pair().is_none()
    }
}

/// Golden-ratio spherical lattice: `x³ = 1 − 2l/L`, azimuth `2πlφ`,
/// `φ = (√5 − 1)/2`, for `l = 1..=L`.
pub fn fibonacci_directions(count: usize) -> Result<DirectionSet> {
    if count == 0 {
        return Err(invalid("fibonacci_directions requires L >= 1"));
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let total = count as f64;
    let dirs = (1..=count)
        .map(|l| {
            let l = l as f64;
            let z = 1.0 - 2.0 * l / total;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let azimuth = 2.0 * PI * l * phi;
            UnitVec3::normalize(Vec3::new(r * azimuth.cos(), r * azimuth.sin(), z))
        })
        .collect::<Result<Vec<_>>>()?;
    DirectionSet::new(dirs, Provenance::Fibonacci)
}

/// Equally spaced directions `(cos(πl/L), sin(πl/L), 0)`, `l = 1..=L`.
pub fn planar_directions(count: usize) -> Result<DirectionSet> {
    if count == 0 {
        return Err(invalid("planar_directions requires L >= 1"));
    }
    let total = count as f64;
    let dirs = (1..=count)
        .map(|l| {
            let angle = PI * l as f64 / total;
            UnitVec3::normalize(Vec3::new(angle.cos(), angle.sin(), 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    DirectionSet::new(dirs, Provenance::Planar)
}

pub fn triple_product(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    a.dot(&b.cross(c))
}

/// True iff every triple of directions has `|a · (b × c)| > 1e-10`.
/// Sets with fewer than three directions pass vacuously.
pub fn no_three_coplanar(ds: &DirectionSet) -> bool {
    let d = ds.directions();
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let cij = d[i].cross(&d[j]);
            if d[j + 1..].iter().any(|dk| cij.dot(dk).abs() <= DEGENERACY_TOL) {
                return false;
            }
        }
    }
    true
}
