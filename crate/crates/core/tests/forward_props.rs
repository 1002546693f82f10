mod common;

use std::f64::consts::PI;

use common::*;
use dipole_core::forward::{far_field_elec, simulate_measurements_with, FrequencyGrid, Sign};
use dipole_core::geometry::{fibonacci_directions, CVec3, Vec3};
use dipole_core::noise::{add_noise_with, block_relative_error, NoiseSpec};
use dipole_core::scene::{Dipole, DipoleKind, Scene};
use dipole_core::Execution;
use num_complex::Complex64;
use proptest::prelude::*;

fn wavenumber() -> impl Strategy<Value = f64> {
    0.01f64..300.0
}

proptest! {
    #[test]
    fn transversality(scene in scene(6), x in direction(), k in wavenumber()) {
        invariants::transversality(&scene, &x, k)?;
    }

    #[test]
    fn magnetic_modulus(z in point(), q in strength(), x in direction(), k in wavenumber()) {
        invariants::magnetic_modulus(&z, &q, &x, k)?;
    }

    #[test]
    fn superposition(scene in scene(6), x in direction(), k in wavenumber()) {
        invariants::superposition(&scene, &x, k)?;
    }

    #[test]
    fn linear_in_strength(z in point(), q1 in strength(), q2 in strength(), x in direction(), k in wavenumber(),
                          a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0)) {
        invariants::linear_in_strength(&z, &q1, &q2, Complex64::new(a.0, a.1), Complex64::new(b.0, b.1), &x, k)?;
    }

    #[test]
    fn conjugate_symmetry_real_magnetic(scene in real_magnetic_scene(6), x in direction(), k in wavenumber()) {
        invariants::conjugate_symmetry(&scene, &x, k)?;
    }

    #[test]
    fn electric_real_strength_is_anti_conjugate(z in point(), q in real_strength(), x in direction(), k in wavenumber()) {
        let plus = far_field_elec(&x, &z, &q, k).unwrap();
        let minus = far_field_elec(&-x, &z, &q, k).unwrap();
        prop_assert!((minus + plus.conj()).norm() <= 1e-14 * plus.norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulation_independent_of_execution(scene in scene(4), ds in directions(5)) {
        let grid = FrequencyGrid::new(20.0, 60).unwrap();
        let a = simulate_measurements_with(&scene, &ds, &grid, Execution::Sequential);
        let b = simulate_measurements_with(&scene, &ds, &grid, Execution::Parallel);
        prop_assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn noise_blocks_calibrated(scene in scene(4), delta in 0.0f64..1.0, seed in any::<u64>()) {
        let ds = fibonacci_directions(5).unwrap();
        let grid = FrequencyGrid::new(10.0, 25).unwrap();
        let clean = simulate_measurements_with(&scene, &ds, &grid, Execution::Parallel);
        let noisy = add_noise_with(&clean, &NoiseSpec::new(delta, seed).unwrap(), Execution::Parallel).unwrap();
        for j in 0..grid.count() {
            for s in Sign::BOTH {
                let r = block_relative_error(&clean, &noisy, j, s).unwrap();
                prop_assert!((r - delta).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn noise_independent_of_execution_and_seeded() {
    let scene = six_dipole_scene();
    let ds = fibonacci_directions(10).unwrap();
    let grid = FrequencyGrid::new(50.0, 200).unwrap();
    let clean = simulate_measurements_with(&scene, &ds, &grid, Execution::Parallel);
    let spec = NoiseSpec::new(0.1, 7).unwrap();
    let a = add_noise_with(&clean, &spec, Execution::Sequential).unwrap();
    let b = add_noise_with(&clean, &spec, Execution::Parallel).unwrap();
    assert_eq!(a.samples(), b.samples());
    let c = add_noise_with(&clean, &NoiseSpec::new(0.1, 8).unwrap(), Execution::Parallel).unwrap();
    assert_ne!(a.samples(), c.samples());
}

#[test]
fn single_dipole_sample_modulus() {
    let q = CVec3::from_parts([1.0, -0.5, 0.25], [0.0, 0.3, 0.0]);
    let scene = Scene::new(vec![Dipole::new(DipoleKind::Magnetic, Vec3::new(0.2, -0.4, 0.9), q).unwrap()]).unwrap();
    let ds = fibonacci_directions(7).unwrap();
    let grid = FrequencyGrid::new(30.0, 90).unwrap();
    let ms = simulate_measurements_with(&scene, &ds, &grid, Execution::Sequential);
    for l in 0..ds.len() {
        for s in Sign::BOTH {
            let x = ds.get(l).vec() * s.factor();
            for j in 0..grid.count() {
                let expected = grid.node(j) / (4.0 * PI) * x.cross_c(&q).norm();
                assert!((ms.sample(l, s, j).norm() - expected).abs() <= 1e-12 * expected);
            }
        }
    }
}
