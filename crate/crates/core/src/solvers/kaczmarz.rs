use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::SliceRandom;

use super::{check_setup, ensure_finite, initial_parameters, FinalParams, Recorder, SolveResult};
use crate::config::{Algorithm, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, IntensityGrid};
use crate::init::{seeded_rng, Stream};
use crate::propagation::{intensity, Propagator};

/// Largest element count accepted; each sweep costs `O(N^2)`.
pub const KACZMARZ_MAX_ELEMENTS: usize = 4096;

/// Randomized Kaczmarz on the magnitude equations `|<w_m, x>| = sqrt(i_m)`.
///
/// One iteration is a sweep over all rows in a fresh seeded order. Row `m`
/// relinearizes the magnitude equation around the current phase of
/// `p_m = <w_m, x>` and projects onto it:
/// `x <- x + ((y_m p_m / |p_m| - p_m) / N) conj(w_m)`. The sweep ends with a
/// phase-only projection; zero entries keep their previous value.
pub fn run_kaczmarz(target: &IntensityGrid, cfg: &SolverConfig) -> Result<SolveResult> {
    check_setup(target, cfg, &[Algorithm::Kaczmarz])?;
    check_size(target.shape().total())?;
    let x0 = initial_parameters(target.shape(), cfg)?;
    run_kaczmarz_from(target, cfg, x0)
}

fn check_size(n: usize) -> Result<()> {
    if n > KACZMARZ_MAX_ELEMENTS {
        return Err(Error::Config(format!(
            "kaczmarz is limited to {KACZMARZ_MAX_ELEMENTS} elements, got {n}"
        )));
    }
    Ok(())
}

pub(crate) fn run_kaczmarz_from(target: &IntensityGrid, cfg: &SolverConfig, x0: ComplexGrid) -> Result<SolveResult> {
    let shape = target.shape().clone();
    shape.ensure_same(x0.shape())?;
    check_size(shape.total())?;
    let (rows, cols) = shape.rows_cols();
    let n = shape.total();
    let prop = Propagator::new(&shape);
    let k = cfg.loss_normalization().factor(n);
    let amp: Vec<f64> = target.as_slice().iter().map(|t| t.sqrt()).collect();
    let kernel = Kernel::new(rows, cols);
    let mut rng = seeded_rng(cfg.seed, Stream::RowOrder);
    let mut order: Vec<usize> = (0..n).collect();
    let mut rec = Recorder::new(target, cfg);

    let mut x = x0;
    let mut h = x.clone();
    project_keep(h.as_mut_slice(), x.as_slice());
    let mut p = h.clone();
    let last = cfg.iterations - 1;
    let mut loss = 0.0;

    for iter in 0..=last {
        p.as_mut_slice().copy_from_slice(h.as_slice());
        prop.forward_in_place(p.as_mut_slice());
        loss = k * p
            .as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(z, t)| (z.norm_sqr() - t).powi(2))
            .sum::<f64>();
        rec.check(iter, loss)?;
        if rec.due(iter) {
            let hs = h.as_slice();
            rec.record(iter, loss, p.as_slice(), None, None, |i| hs[i], None)?;
        }
        if iter < last {
            order.shuffle(&mut rng);
            for &m in &order {
                kernel.row_update(x.as_mut_slice(), m, amp[m]);
            }
            ensure_finite(x.as_slice(), iter + 1)?;
            project_keep(x.as_mut_slice(), h.as_slice());
            h.as_mut_slice().copy_from_slice(x.as_slice());
        }
    }

    let final_psnr = rec.psnr(p.as_slice())?;
    Ok(SolveResult {
        algorithm: Algorithm::Kaczmarz,
        final_params: FinalParams::Cartesian(x),
        displayed: intensity(&p),
        final_hologram: h,
        log: rec.log,
        trajectory: rec.trajectory,
        final_loss: loss,
        final_psnr,
    })
}

/// Normalizes `x` in place; entries with `|x_n| = 0` take `prev_n`.
fn project_keep(x: &mut [Complex64], prev: &[Complex64]) {
    for (z, &q) in x.iter_mut().zip(prev) {
        let r = z.norm();
        *z = if r > 0.0 { *z / r } else { q };
    }
}

/// Per-axis twiddle tables: `w_mn = ra[(m_r n_r) mod R] ca[(m_c n_c) mod C]`.
struct Kernel {
    rows: usize,
    cols: usize,
    row_tw: Vec<Complex64>,
    col_tw: Vec<Complex64>,
}

impl Kernel {
    fn new(rows: usize, cols: usize) -> Self {
        let tw = |e: usize| {
            (0..e)
                .map(|k| Complex64::from_polar(1.0, -TAU * k as f64 / e as f64))
                .collect()
        };
        Self {
            rows,
            cols,
            row_tw: tw(rows),
            col_tw: tw(cols),
        }
    }

    fn row_update(&self, x: &mut [Complex64], m: usize, y: f64) {
        let (mr, mc) = (m / self.cols, m % self.cols);
        let rf: Vec<Complex64> = (0..self.rows).map(|r| self.row_tw[(mr * r) % self.rows]).collect();
        let cf: Vec<Complex64> = (0..self.cols).map(|c| self.col_tw[(mc * c) % self.cols]).collect();
        let mut p = Complex64::new(0.0, 0.0);
        for (r, xr) in x.chunks_exact(self.cols).enumerate() {
            let s: Complex64 = xr.iter().zip(&cf).map(|(v, w)| v * w).sum();
            p += rf[r] * s;
        }
        let r = p.norm();
        let phase = if r > 0.0 { p / r } else { Complex64::new(1.0, 0.0) };
        let delta = (y * phase - p) / (self.rows * self.cols) as f64;
        for (r, xr) in x.chunks_exact_mut(self.cols).enumerate() {
            let dr = delta * rf[r].conj();
            for (v, w) in xr.iter_mut().zip(&cf) {
                *v += dr * w.conj();
            }
        }
    }
}
