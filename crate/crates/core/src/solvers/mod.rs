//! The iterative hologram solvers.
//!
//! Every solver evaluates and logs iterates `tau = 0..T-1`, applies `T - 1`
//! updates and returns the iterate `T - 1`. All of them start from the same
//! Cartesian draw `c[0]`: WFCF uses it directly, WFPF takes its phases, GS its
//! phase-only projection and Kaczmarz uses it as the first iterate.

mod adam;
mod gs;
mod kaczmarz;
mod wfcf;
mod wfpf;

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use adam::{adam_step, AdamState};
pub use gs::run_gs;
pub use kaczmarz::{run_kaczmarz, KACZMARZ_MAX_ELEMENTS};
pub use wfcf::{run_wfcf, run_wfcf_from, WfcfStep};
pub use wfpf::{run_wfpf, run_wfpf_from};

use crate::config::{Algorithm, IterationRecord, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{wrap_phase, ComplexGrid, GridShape, IntensityGrid, PhaseGrid};
use crate::init::init_cartesian;
use crate::metrics::{psnr_values, PsnrOptions};

/// Parameters at the last iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalParams {
    Cartesian(ComplexGrid),
    Phase(PhaseGrid),
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub algorithm: Algorithm,
    pub final_params: FinalParams,
    /// Unit-amplitude hologram `h[T-1]`.
    pub final_hologram: ComplexGrid,
    /// `|W h[T-1]|^2`.
    pub displayed: IntensityGrid,
    pub log: Vec<IterationRecord>,
    pub trajectory: Option<Trajectory>,
    /// Loss at `T - 1`, whether or not that iterate was logged.
    pub final_loss: f64,
    pub final_psnr: f64,
}

impl SolveResult {
    /// Phases of the final hologram, the pattern written to disk.
    pub fn final_phases(&self) -> PhaseGrid {
        let phases = self
            .final_hologram
            .as_slice()
            .iter()
            .map(|z| wrap_phase(z.arg()))
            .collect();
        PhaseGrid::new(self.final_hologram.shape().clone(), phases)
            .expect("phases of finite values are finite")
    }
}

/// Values and gradients at the tracked indices, one snapshot per log entry.
///
/// For WFCF `values` are `c_n` and `grads` the Cartesian gradient. For WFPF
/// `values` are `exp(j phi_n)` and `grads` hold the phase gradient in the real
/// part. GS and Kaczmarz record hologram values without gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub algorithm: Algorithm,
    pub learning_rate: f64,
    pub stride: usize,
    pub indices: Vec<usize>,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iter: usize,
    pub values: Vec<Complex64>,
    pub grads: Option<Vec<Complex64>>,
}

/// Dispatches on `cfg.algorithm`.
pub fn solve(target: &IntensityGrid, cfg: &SolverConfig) -> Result<SolveResult> {
    match cfg.algorithm {
        Algorithm::Wfcf => run_wfcf(target, cfg),
        Algorithm::Wfpf | Algorithm::WfpfAdam => run_wfpf(target, cfg),
        Algorithm::Gs => run_gs(target, cfg),
        Algorithm::Kaczmarz => run_kaczmarz(target, cfg),
    }
}

/// The shared Cartesian starting point `c[0]`.
pub fn initial_parameters(shape: &GridShape, cfg: &SolverConfig) -> Result<ComplexGrid> {
    init_cartesian(shape, cfg.seed, 2.0 * cfg.init_variance)
}

fn check_setup(target: &IntensityGrid, cfg: &SolverConfig, allowed: &[Algorithm]) -> Result<()> {
    if !allowed.contains(&cfg.algorithm) {
        return Err(Error::Config(format!(
            "solver for {:?} called with algorithm {}",
            allowed, cfg.algorithm
        )));
    }
    cfg.validate()?;
    if let Some(idx) = &cfg.snapshot_indices {
        let n = target.shape().total();
        if let Some(bad) = idx.iter().find(|&&i| i >= n) {
            return Err(Error::Config(format!("tracked index {bad} out of range for {n} elements")));
        }
    }
    Ok(())
}

/// Per-iteration bookkeeping shared by the solvers.
struct Recorder<'a> {
    target: &'a [f64],
    stride: usize,
    start: Instant,
    log: Vec<IterationRecord>,
    trajectory: Option<Trajectory>,
    displayed: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(target: &'a IntensityGrid, cfg: &SolverConfig) -> Self {
        let trajectory = cfg.snapshot_indices.as_ref().map(|idx| Trajectory {
            algorithm: cfg.algorithm,
            learning_rate: cfg.learning_rate,
            stride: cfg.log_stride,
            indices: idx.clone(),
            snapshots: Vec::new(),
        });
        Self {
            target: target.as_slice(),
            stride: cfg.log_stride,
            start: Instant::now(),
            log: Vec::with_capacity(cfg.iterations.div_ceil(cfg.log_stride)),
            trajectory,
            displayed: vec![0.0; target.shape().total()],
        }
    }

    fn due(&self, iter: usize) -> bool {
        iter.is_multiple_of(self.stride)
    }

    fn check(&self, iter: usize, loss: f64) -> Result<()> {
        if loss.is_finite() {
            Ok(())
        } else {
            Err(Error::Divergence { iteration: iter })
        }
    }

    fn psnr(&mut self, field: &[Complex64]) -> Result<f64> {
        for (d, p) in self.displayed.iter_mut().zip(field) {
            *d = p.norm_sqr();
        }
        psnr_values(&self.displayed, self.target, PsnrOptions::default())
    }

    /// Logs iterate `iter`. `field` is the propagated field of the current
    /// hologram.
    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        iter: usize,
        loss: f64,
        field: &[Complex64],
        min_amp: Option<f64>,
        max_grad_amp: Option<f64>,
        values: impl Fn(usize) -> Complex64,
        grads: Option<&dyn Fn(usize) -> Complex64>,
    ) -> Result<()> {
        let psnr_db = self.psnr(field)?;
        self.log.push(IterationRecord {
            iter,
            loss,
            psnr_db,
            min_amp,
            max_grad_amp,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        });
        if let Some(traj) = &mut self.trajectory {
            let snap = Snapshot {
                iter,
                values: traj.indices.iter().map(|&i| values(i)).collect(),
                grads: grads.map(|g| traj.indices.iter().map(|&i| g(i)).collect()),
            };
            traj.snapshots.push(snap);
        }
        Ok(())
    }
}

fn max_abs<T: Copy>(v: &[T], f: impl Fn(T) -> f64) -> f64 {
    v.iter().map(|&x| f(x)).fold(0.0, f64::max)
}

fn ensure_finite(v: &[Complex64], iteration: usize) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { iteration })
    }
}
