use std::f64::consts::PI;

use dipole_core::forward::{far_field_elec, far_field_mag, far_field_scene};
use dipole_core::geometry::{CVec3, Vec3};
use dipole_core::scene::{DipoleKind, Scene};
use num_complex::Complex64;
use proptest::test_runner::TestCaseError;

type Check = Result<(), TestCaseError>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn transversality(scene: &Scene, x: &Vec3, k: f64) -> Check {
    let e = far_field_scene(x, k, scene).unwrap();
    let scale: f64 = scene.dipoles().iter().map(|d| d.strength.norm()).sum::<f64>() * k / (4.0 * PI);
    let dot = e.dot_real(x).norm();
    ensure(dot <= 1e-12 * scale.max(1.0), || format!("x̂·E = {dot:e}"))
}

pub fn magnetic_modulus(z: &Vec3, q: &CVec3, x: &Vec3, k: f64) -> Check {
    let e = far_field_mag(x, z, q, k).unwrap();
    let expected = k / (4.0 * PI) * x.cross_c(q).norm();
    ensure((e.norm() - expected).abs() <= 1e-12 * expected.max(1e-300), || {
        format!("|E| = {} vs {expected}", e.norm())
    })
}

pub fn superposition(scene: &Scene, x: &Vec3, k: f64) -> Check {
    let total = far_field_scene(x, k, scene).unwrap();
    let mut sum = CVec3::ZERO;
    let mut scale = 0.0;
    for d in scene.dipoles() {
        let part = match d.kind {
            DipoleKind::Magnetic => far_field_mag(x, &d.location, &d.strength, k).unwrap(),
            DipoleKind::Electric => far_field_elec(x, &d.location, &d.strength, k).unwrap(),
        };
        scale += part.norm();
        sum += part;
    }
    let err = (total - sum).norm();
    ensure(err <= 1e-14 * scale.max(1e-300), || format!("superposition residual {err:e}"))
}

pub fn linear_in_strength(z: &Vec3, q1: &CVec3, q2: &CVec3, a: Complex64, b: Complex64, x: &Vec3, k: f64) -> Check {
    for f in [far_field_mag, far_field_elec] {
        let lhs = f(x, z, &(q1.scale(a) + q2.scale(b)), k).unwrap();
        let p1 = f(x, z, q1, k).unwrap().scale(a);
        let p2 = f(x, z, q2, k).unwrap().scale(b);
        let scale = p1.norm() + p2.norm();
        let err = (lhs - (p1 + p2)).norm();
        ensure(err <= 4e-14 * scale.max(1e-300), || format!("linearity residual {err:e}"))?;
    }
    Ok(())
}

pub fn conjugate_symmetry(scene: &Scene, x: &Vec3, k: f64) -> Check {
    let plus = far_field_scene(x, k, scene).unwrap();
    let minus = far_field_scene(&-*x, k, scene).unwrap();
    let err = (minus - plus.conj()).norm();
    ensure(err <= 1e-14 * plus.norm().max(1e-300), || format!("E(−x̂) − conj E(x̂) = {err:e}"))
}
