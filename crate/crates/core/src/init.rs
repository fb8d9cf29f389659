//! Seeded random initialization.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::{wrap_phase, ComplexGrid, GridShape, PhaseGrid};

/// Amplitudes below this are re-drawn so that `c / |c|` is defined.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

const MAX_REDRAWS: usize = 100;

/// Independent random streams derived from one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init = 0,
    Witness = 1,
    RowOrder = 2,
    Probe = 3,
}

pub fn seeded_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Draws a circularly-symmetric complex Gaussian grid with total variance
/// `E|c|^2 = variance` (each real component has `variance / 2`).
pub fn init_cartesian(shape: &GridShape, seed: u64, variance: f64) -> Result<ComplexGrid> {
    complex_gaussian(shape, seed, Stream::Init, variance)
}

pub(crate) fn complex_gaussian(
    shape: &GridShape,
    seed: u64,
    stream: Stream,
    variance: f64,
) -> Result<ComplexGrid> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::Config(format!("variance must be positive, got {variance}")));
    }
    let normal = Normal::new(0.0, (variance / 2.0).sqrt())
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = seeded_rng(seed, stream);
    let mut data = Vec::with_capacity(shape.total());
    for index in 0..shape.total() {
        let mut attempts = 0;
        let z = loop {
            let z = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            attempts += 1;
            if z.norm() >= AMPLITUDE_FLOOR {
                break z;
            }
            if attempts >= MAX_REDRAWS {
                return Err(Error::DegenerateSample { index, attempts });
            }
        };
        data.push(z);
    }
    ComplexGrid::new(shape.clone(), data)
}

/// `phi_n = arg(c_n)` wrapped to `[0, 2pi)`.
pub fn init_phase_from(c0: &ComplexGrid) -> Result<PhaseGrid> {
    c0.ensure_nonzero()?;
    let phases = c0.as_slice().iter().map(|z| wrap_phase(z.arg())).collect();
    PhaseGrid::new(c0.shape().clone(), phases)
}
