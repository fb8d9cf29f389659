mod common;

use common::*;
use holoflow::propagation::{adjoint_propagate, intensity, project_phase_only, propagate};
use holoflow::{Complex64, ComplexGrid, GridShape, Propagator};
use proptest::prelude::*;

#[test]
fn forward_matches_direct_sum() {
    let mut r = rng(1);
    let mut shapes: Vec<GridShape> = (1..=64).map(|n| GridShape::d1(n).unwrap()).collect();
    shapes.push(GridShape::d2(8, 8).unwrap());
    shapes.push(GridShape::d2(3, 5).unwrap());
    for s in shapes {
        let x = random_complex(&s, &mut r);
        let d = max_abs_diff(propagate(&x).as_slice(), &direct_dft(&x, -1.0));
        assert!(d < 1e-10, "{s}: {d:e}");
    }
}

#[test]
fn adjoint_matches_direct_conjugate_sum() {
    let mut r = rng(2);
    let mut shapes: Vec<GridShape> = (1..=64).map(|n| GridShape::d1(n).unwrap()).collect();
    shapes.push(GridShape::d2(8, 8).unwrap());
    for s in shapes {
        let g = random_complex(&s, &mut r);
        let d = max_abs_diff(adjoint_propagate(&g).as_slice(), &direct_dft(&g, 1.0));
        assert!(d < 1e-10, "{s}: {d:e}");
    }
}

#[test]
fn eight_point_forward() {
    let mut r = rng(3);
    let x = random_complex(&GridShape::d1(8).unwrap(), &mut r);
    assert!(max_abs_diff(propagate(&x).as_slice(), &direct_dft(&x, -1.0)) < 1e-10);
}

#[test]
fn round_trip_and_parseval() {
    let mut r = rng(4);
    for s in [
        GridShape::d1(16).unwrap(),
        GridShape::d1(100).unwrap(),
        GridShape::d2(32, 32).unwrap(),
        GridShape::d2(6, 10).unwrap(),
    ] {
        let n = s.total() as f64;
        let x = random_complex(&s, &mut r);
        let back = adjoint_propagate(&propagate(&x));
        let scaled: Vec<Complex64> = x.as_slice().iter().map(|z| z * n).collect();
        assert!(rel_err(back.as_slice(), &scaled) < 1e-12, "{s}");
        let e_in: f64 = x.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let e_out: f64 = propagate(&x).as_slice().iter().map(|z| z.norm_sqr()).sum();
        assert!((e_out - n * e_in).abs() <= 1e-12 * n * e_in, "{s}");
    }
}

#[test]
fn unit_hologram_energy_is_n_squared() {
    let mut r = rng(5);
    for s in [GridShape::d1(64).unwrap(), GridShape::d2(16, 8).unwrap()] {
        let n = s.total() as f64;
        let h = project_phase_only(&random_complex(&s, &mut r)).unwrap();
        assert!(h.as_slice().iter().all(|z| (z.norm() - 1.0).abs() <= 1e-15));
        let e = intensity(&propagate(&h)).sum();
        assert!((e - n * n).abs() <= 1e-10 * n * n);
    }
}

#[test]
fn cached_operator_agrees_with_free_functions() {
    let mut r = rng(6);
    let s = GridShape::d2(4, 6).unwrap();
    let prop = Propagator::new(&s);
    let x = random_complex(&s, &mut r);
    assert_eq!(prop.propagate(&x).unwrap(), propagate(&x));
    assert_eq!(prop.adjoint_propagate(&x).unwrap(), adjoint_propagate(&x));
}

#[test]
fn intensity_sum_matches_field_energy() {
    let mut r = rng(7);
    let p = random_complex(&GridShape::d1(8).unwrap(), &mut r);
    let e: f64 = p.as_slice().iter().map(|z| z.norm_sqr()).sum();
    assert_eq!(intensity(&p).sum(), e);
}

fn grid_strategy() -> impl Strategy<Value = ComplexGrid> {
    (1usize..6, 1usize..12).prop_flat_map(|(r, c)| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), r * c).prop_map(move |v| {
            let shape = if r == 1 { GridShape::d1(c) } else { GridShape::d2(r, c) }.unwrap();
            ComplexGrid::new(shape, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn prop_adjoint_is_conjugate_transpose(x in grid_strategy(), seed in 0u64..1000) {
        // <F x, y> = <x, F^H y>
        let mut r = rng(seed);
        let y = random_complex(x.shape(), &mut r);
        let fx = propagate(&x);
        let fhy = adjoint_propagate(&y);
        let lhs: Complex64 = fx.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a * b.conj()).sum();
        let rhs: Complex64 = x.as_slice().iter().zip(fhy.as_slice()).map(|(a, b)| a * b.conj()).sum();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn prop_linearity(x in grid_strategy(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let s = Complex64::new(a, b);
        let sx = ComplexGrid::new(x.shape().clone(), x.as_slice().iter().map(|z| z * s).collect()).unwrap();
        let lhs = propagate(&sx);
        let rhs: Vec<Complex64> = propagate(&x).as_slice().iter().map(|z| z * s).collect();
        prop_assert!(max_abs_diff(lhs.as_slice(), &rhs) <= 1e-10 * (1.0 + norm2(&rhs)));
    }

    #[test]
    fn prop_projection_is_idempotent(x in grid_strategy()) {
        prop_assume!(x.as_slice().iter().all(|z| z.norm() > 1e-3));
        let once = project_phase_only(&x).unwrap();
        let twice = project_phase_only(&once).unwrap();
        prop_assert!(max_abs_diff(once.as_slice(), twice.as_slice()) <= 1e-15);
    }
}
