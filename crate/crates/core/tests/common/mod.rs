#![allow(dead_code)]

use std::f64::consts::TAU;

use holoflow::{Complex64, ComplexGrid, GridShape, IntensityGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in [-1, 1], bounded away
/// from zero amplitude.
pub fn random_complex(shape: &GridShape, r: &mut ChaCha8Rng) -> ComplexGrid {
    ComplexGrid::from_fn(shape.clone(), |_| loop {
        let z = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        if z.norm() > 0.1 {
            break z;
        }
    })
}

pub fn random_target(shape: &GridShape, r: &mut ChaCha8Rng) -> IntensityGrid {
    let n = shape.total() as f64;
    let raw: Vec<f64> = (0..shape.total()).map(|_| r.random_range(0.0..2.0)).collect();
    let s: f64 = raw.iter().sum();
    IntensityGrid::new(shape.clone(), raw.into_iter().map(|v| v * n * n / s).collect()).unwrap()
}

pub fn random_phases(n: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| r.random_range(0.0..TAU)).collect()
}

/// `sum_n exp(sign j 2pi <m, n> / extent) x_n` by direct summation.
pub fn direct_dft(x: &ComplexGrid, sign: f64) -> Vec<Complex64> {
    let (rows, cols) = x.shape().rows_cols();
    let v = x.as_slice();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (m, o) in out.iter_mut().enumerate() {
        let (mr, mc) = (m / cols, m % cols);
        for (n, xn) in v.iter().enumerate() {
            let (nr, nc) = (n / cols, n % cols);
            let arg = TAU * (((mr * nr) % rows) as f64 / rows as f64 + ((mc * nc) % cols) as f64 / cols as f64);
            *o += Complex64::from_polar(1.0, sign * arg) * xn;
        }
    }
    out
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d) / norm2(b).max(f64::MIN_POSITIVE)
}

pub fn shapes() -> Vec<GridShape> {
    vec![
        GridShape::d1(4).unwrap(),
        GridShape::d1(8).unwrap(),
        GridShape::d1(16).unwrap(),
        GridShape::d2(4, 4).unwrap(),
    ]
}
