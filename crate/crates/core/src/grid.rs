//! Grid geometry and the dense value grids shared by every module.
//!
//! Two-dimensional grids are stored row-major: element `(r, c)` of a
//! `rows x cols` grid lives at linear index `r * cols + c`. Every module
//! (propagation kernels, image I/O, trajectories) uses this linearization.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    dims: Vec<usize>,
}

impl GridShape {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.len() > 2 {
            return Err(Error::InvalidShape {
                dims: dims.to_vec(),
                reason: "expected one or two extents",
            });
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape {
                dims: dims.to_vec(),
                reason: "extents must be positive",
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
        })
    }

    pub fn d1(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn d2(rows: usize, cols: usize) -> Result<Self> {
        Self::new(&[rows, cols])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Element count, the `N` of every normalization constant.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_2d(&self) -> bool {
        self.dims.len() == 2
    }

    /// `(rows, cols)`; a 1D shape of length `n` is reported as `(1, n)`.
    pub fn rows_cols(&self) -> (usize, usize) {
        match self.dims.as_slice() {
            [n] => (1, *n),
            [r, c] => (*r, *c),
            _ => unreachable!("GridShape holds one or two extents"),
        }
    }

    pub fn linear_index(&self, row: usize, col: usize) -> usize {
        let (_, cols) = self.rows_cols();
        row * cols + col
    }

    pub fn unravel(&self, index: usize) -> (usize, usize) {
        let (_, cols) = self.rows_cols();
        (index / cols, index % cols)
    }

    pub(crate) fn ensure_same(&self, other: &GridShape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                expected: self.dims.clone(),
                actual: other.dims.clone(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for GridShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.dims.as_slice() {
            [n] => write!(f, "{n}"),
            [r, c] => write!(f, "{r}x{c}"),
            _ => unreachable!(),
        }
    }
}

impl std::str::FromStr for GridShape {
    type Err = Error;

    /// Parses `N` or `RxC`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid grid extent `{t}`")))
        };
        match s.split_once(['x', 'X']) {
            Some((r, c)) => GridShape::d2(parse(r)?, parse(c)?),
            None => GridShape::d1(parse(s)?),
        }
    }
}

fn check_len(shape: &GridShape, len: usize) -> Result<()> {
    if shape.total() != len {
        return Err(Error::DimensionMismatch {
            declared: shape.total(),
            actual: len,
        });
    }
    Ok(())
}

/// Complex values on a grid: hologram parameters `c_n`, unit-amplitude
/// holograms and propagated fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    shape: GridShape,
    data: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(shape: GridShape, data: Vec<Complex64>) -> Result<Self> {
        check_len(&shape, data.len())?;
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: GridShape) -> Self {
        let n = shape.total();
        Self {
            shape,
            data: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_fn(shape: GridShape, f: impl FnMut(usize) -> Complex64) -> Self {
        let data = (0..shape.total()).map(f).collect();
        Self { shape, data }
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn min_amplitude(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Errors on the first entry with `|c_n| = 0`.
    pub fn ensure_nonzero(&self) -> Result<()> {
        match self.data.iter().position(|z| z.norm() == 0.0) {
            Some(index) => Err(Error::ZeroAmplitude { index }),
            None => Ok(()),
        }
    }
}

/// Nonnegative intensities: targets `|i_m|^2` and displayed `|p_m|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityGrid {
    shape: GridShape,
    data: Vec<f64>,
}

impl IntensityGrid {
    pub fn new(shape: GridShape, data: Vec<f64>) -> Result<Self> {
        check_len(&shape, data.len())?;
        if let Some(i) = data.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(format!(
                "intensity at index {i} is {} (must be finite and nonnegative)",
                data[i]
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// Phases `phi_n` of a unit-amplitude hologram, kept in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    shape: GridShape,
    data: Vec<f64>,
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2pi
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl PhaseGrid {
    /// Builds a grid, wrapping every value into `[0, 2pi)`.
    pub fn new(shape: GridShape, data: Vec<f64>) -> Result<Self> {
        check_len(&shape, data.len())?;
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("phase at index {i} is not finite")));
        }
        Ok(Self {
            shape,
            data: data.into_iter().map(wrap_phase).collect(),
        })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Subtracts `step_n` from each phase and re-wraps.
    pub fn descend(&mut self, step: &[f64]) {
        for (phi, s) in self.data.iter_mut().zip(step) {
            *phi = wrap_phase(*phi - s);
        }
    }

    /// The hologram `exp(j phi_n)`.
    pub fn to_hologram(&self) -> ComplexGrid {
        ComplexGrid {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&p| Complex64::from_polar(1.0, p)).collect(),
        }
    }
}
