#![allow(dead_code)]

pub mod invariants;
pub mod lemmas;

use dipole_core::geometry::{CVec3, DirectionSet, UnitVec3, Vec3};
use dipole_core::scene::{Dipole, DipoleKind, Scene};
use proptest::prelude::*;

pub fn coord() -> impl Strategy<Value = f64> {
    -1.5f64..1.5
}

pub fn point() -> impl Strategy<Value = Vec3> {
    [coord(), coord(), coord()].prop_map(Vec3)
}

pub fn strength() -> impl Strategy<Value = CVec3> {
    ([-2.0f64..2.0, -2.0..2.0, -2.0..2.0], [-2.0f64..2.0, -2.0..2.0, -2.0..2.0])
        .prop_filter("nonzero strength", |(re, im)| re.iter().chain(im).any(|c| c.abs() > 1e-3))
        .prop_map(|(re, im)| CVec3::from_parts(re, im))
}

pub fn real_strength() -> impl Strategy<Value = CVec3> {
    [-2.0f64..2.0, -2.0..2.0, -2.0..2.0]
        .prop_filter("nonzero strength", |re| re.iter().any(|c| c.abs() > 1e-3))
        .prop_map(|re| CVec3::from_parts(re, [0.0; 3]))
}

pub fn kind() -> impl Strategy<Value = DipoleKind> {
    prop_oneof![Just(DipoleKind::Magnetic), Just(DipoleKind::Electric)]
}

pub fn direction() -> impl Strategy<Value = Vec3> {
    [-1.0f64..1.0, -1.0..1.0, -1.0..1.0]
        .prop_filter("away from origin", |v| Vec3(*v).norm() > 0.1)
        .prop_map(|v| {
            let v = Vec3(v);
            let u = v * (1.0 / v.norm());
            UnitVec3::normalize(u).unwrap().vec()
        })
}

fn build_scene(parts: Vec<(DipoleKind, Vec3, CVec3)>) -> Option<Scene> {
    let dipoles = parts
        .into_iter()
        .map(|(k, z, q)| Dipole::new(k, z, q))
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    Scene::new(dipoles).ok()
}

pub fn scene(max: usize) -> impl Strategy<Value = Scene> {
    prop::collection::vec((kind(), point(), strength()), 1..=max)
        .prop_filter_map("distinct locations", build_scene)
}

pub fn real_magnetic_scene(max: usize) -> impl Strategy<Value = Scene> {
    prop::collection::vec((Just(DipoleKind::Magnetic), point(), real_strength()), 1..=max)
        .prop_filter_map("distinct locations", build_scene)
}

pub fn scene_of_kind(kind: DipoleKind, max: usize) -> impl Strategy<Value = Scene> {
    prop::collection::vec((Just(kind), point(), strength()), 1..=max)
        .prop_filter_map("distinct locations", build_scene)
}

pub fn directions(count: usize) -> impl Strategy<Value = DirectionSet> {
    prop::collection::vec(direction(), count).prop_filter_map("non-collinear", |v| {
        DirectionSet::explicit(&v.iter().map(|d| d.0).collect::<Vec<_>>()).ok()
    })
}

/// Six-dipole benchmark: three magnetic dipoles on the negative axes,
/// three electric on the positive axes.
pub fn six_dipole_scene() -> Scene {
    Scene::new(vec![
        Dipole::magnetic([-1.0, 0.0, 0.0], [1.0, 1.0, -1.0], [0.0; 3]).unwrap(),
        Dipole::magnetic([0.0, -1.0, 0.0], [-0.5, 0.0, 1.0], [0.0; 3]).unwrap(),
        Dipole::magnetic([0.0, 0.0, -1.0], [-1.0, 0.2, 0.0], [0.0; 3]).unwrap(),
        Dipole::electric([1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.0; 3]).unwrap(),
        Dipole::electric([0.0, 1.0, 0.0], [0.5, 0.0, 1.0], [0.0; 3]).unwrap(),
        Dipole::electric([0.0, 0.0, 1.0], [1.0, 0.2, 0.0], [0.0; 3]).unwrap(),
    ])
    .unwrap()
}

/// Nineteen in-plane magnetic dipoles with single-axis complex strengths.
pub fn nineteen_dipole_scene() -> Scene {
    let rows: [([f64; 2], usize, [f64; 2]); 19] = [
        ([1.4, 1.4], 0, [1.20, 1.49]),
        ([0.8, 1.4], 1, [-1.40, -0.63]),
        ([0.4, 1.0], 0, [1.00, -0.96]),
        ([-0.2, 1.0], 0, [1.20, 0.84]),
        ([-0.8, 1.0], 1, [0.83, -1.41]),
        ([-1.2, 0.6], 0, [0.90, 1.43]),
        ([0.0, 0.6], 2, [1.35, -0.97]),
        ([-0.8, -0.2], 2, [1.19, 1.28]),
        ([-1.2, -0.2], 0, [1.45, -0.58]),
        ([-0.8, -0.6], 2, [0.67, 1.44]),
        ([-0.6, -0.8], 0, [-1.08, -1.47]),
        ([-0.2, -1.2], 0, [1.00, 1.39]),
        ([-0.2, -0.8], 1, [-1.16, 1.44]),
        ([0.6, 0.0], 0, [-0.52, -0.70]),
        ([0.6, -1.2], 0, [1.02, 1.15]),
        ([1.0, -0.8], 0, [0.77, 0.79]),
        ([1.0, -0.2], 0, [1.42, -1.07]),
        ([1.0, 0.4], 1, [0.82, 0.87]),
        ([1.4, 0.8], 0, [-1.32, -0.65]),
    ];
    let dipoles = rows
        .iter()
        .map(|&([x, y], axis, [re, im])| {
            let mut r = [0.0; 3];
            let mut i = [0.0; 3];
            r[axis] = re;
            i[axis] = im;
            Dipole::magnetic([x, y, 0.0], r, i).unwrap()
        })
        .collect();
    Scene::new(dipoles).unwrap()
}
