//! Far-field propagation.
//!
//! At infinite distance the propagation kernel is the Fourier basis. The
//! forward operator is the unnormalized DFT
//! `p_m = sum_n exp(-j 2pi <m, n> / extent) h_n`, applied per axis for 2D
//! grids, and the adjoint is its conjugate transpose, so
//! `adjoint(forward(x)) = N x` with `N` the element count.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, GridShape, IntensityGrid};

/// Cached FFT plans for one grid shape.
#[derive(Clone)]
pub struct Propagator {
    shape: GridShape,
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator").field("shape", &self.shape).finish()
    }
}

impl Propagator {
    pub fn new(shape: &GridShape) -> Self {
        let (rows, cols) = shape.rows_cols();
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.clone(),
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    /// Element count `N`.
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.apply(buf, &self.row_fwd, &self.col_fwd);
    }

    pub fn adjoint_in_place(&self, buf: &mut [Complex64]) {
        self.apply(buf, &self.row_inv, &self.col_inv);
    }

    fn apply(&self, buf: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        assert_eq!(buf.len(), self.len(), "buffer length does not match propagator shape");
        let scratch_len = row
            .get_inplace_scratch_len()
            .max(col.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        // rustfft transforms every contiguous chunk of the row length
        row.process_with_scratch(buf, &mut scratch);
        if self.rows > 1 {
            let mut column = vec![Complex64::new(0.0, 0.0); self.rows];
            for c in 0..self.cols {
                for (r, v) in column.iter_mut().enumerate() {
                    *v = buf[r * self.cols + c];
                }
                col.process_with_scratch(&mut column, &mut scratch);
                for (r, v) in column.iter().enumerate() {
                    buf[r * self.cols + c] = *v;
                }
            }
        }
    }

    /// `p = W h`.
    pub fn propagate(&self, h: &ComplexGrid) -> Result<ComplexGrid> {
        self.shape.ensure_same(h.shape())?;
        let mut out = h.clone();
        self.forward_in_place(out.as_mut_slice());
        Ok(out)
    }

    /// `t = W^H g`, i.e. `t_n = sum_m conj(w_mn) g_m`.
    pub fn adjoint_propagate(&self, g: &ComplexGrid) -> Result<ComplexGrid> {
        self.shape.ensure_same(g.shape())?;
        let mut out = g.clone();
        self.adjoint_in_place(out.as_mut_slice());
        Ok(out)
    }
}

pub fn propagate(h: &ComplexGrid) -> ComplexGrid {
    let mut out = h.clone();
    Propagator::new(h.shape()).forward_in_place(out.as_mut_slice());
    out
}

pub fn adjoint_propagate(g: &ComplexGrid) -> ComplexGrid {
    let mut out = g.clone();
    Propagator::new(g.shape()).adjoint_in_place(out.as_mut_slice());
    out
}

/// `h_n = c_n / |c_n|`.
pub fn project_phase_only(c: &ComplexGrid) -> Result<ComplexGrid> {
    let mut out = c.clone();
    project_in_place(out.as_mut_slice())?;
    Ok(out)
}

pub(crate) fn project_in_place(buf: &mut [Complex64]) -> Result<()> {
    for (index, z) in buf.iter_mut().enumerate() {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::ZeroAmplitude { index });
        }
        *z /= r;
    }
    Ok(())
}

/// `|p_m|^2`.
pub fn intensity(p: &ComplexGrid) -> IntensityGrid {
    let data = p.as_slice().iter().map(|z| z.norm_sqr()).collect();
    IntensityGrid::new(p.shape().clone(), data).expect("squared moduli are nonnegative")
}
