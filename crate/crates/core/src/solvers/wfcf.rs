use num_complex::Complex64;

use super::{check_setup, ensure_finite, initial_parameters, max_abs, FinalParams, Recorder, SolveResult};
use crate::config::{Algorithm, SolverConfig};
use crate::error::Result;
use crate::gradients::GradientWorkspace;
use crate::grid::{ComplexGrid, IntensityGrid};
use crate::propagation::{intensity, Propagator};

/// State handed to a [`run_wfcf_from`] observer at every iterate, logged or
/// not. `grad` is in the run's loss normalization.
#[derive(Debug)]
pub struct WfcfStep<'a> {
    pub iter: usize,
    pub loss: f64,
    pub params: &'a [Complex64],
    pub grad: &'a [Complex64],
}

/// Wirtinger flow on the Cartesian parameters: `c <- c - alpha grad`.
pub fn run_wfcf(target: &IntensityGrid, cfg: &SolverConfig) -> Result<SolveResult> {
    check_setup(target, cfg, &[Algorithm::Wfcf])?;
    let c0 = initial_parameters(target.shape(), cfg)?;
    run_wfcf_from(target, cfg, c0, |_| {})
}

/// As [`run_wfcf`], starting from `c0` and reporting every iterate.
pub fn run_wfcf_from(
    target: &IntensityGrid,
    cfg: &SolverConfig,
    c0: ComplexGrid,
    mut observer: impl FnMut(&WfcfStep),
) -> Result<SolveResult> {
    check_setup(target, cfg, &[Algorithm::Wfcf])?;
    target.shape().ensure_same(c0.shape())?;
    c0.ensure_nonzero()?;
    let norm = cfg.loss_normalization();
    let prop = Propagator::new(target.shape());
    let mut ws = GradientWorkspace::new(&prop, target)?;
    let mut rec = Recorder::new(target, cfg);
    let mut c = c0;
    let mut grad = vec![Complex64::new(0.0, 0.0); c.len()];
    let last = cfg.iterations - 1;
    let mut loss = 0.0;

    for iter in 0..=last {
        loss = ws.cartesian(c.as_slice(), norm, &mut grad)?;
        observer(&WfcfStep {
            iter,
            loss,
            params: c.as_slice(),
            grad: &grad,
        });
        rec.check(iter, loss)?;
        if rec.due(iter) {
            let cs = c.as_slice();
            rec.record(
                iter,
                loss,
                ws.field(),
                Some(c.min_amplitude()),
                Some(max_abs(&grad, |g| g.norm())),
                |i| cs[i],
                Some(&|i| grad[i]),
            )?;
        }
        if iter < last {
            for (z, g) in c.as_mut_slice().iter_mut().zip(&grad) {
                *z -= cfg.learning_rate * g;
            }
            ensure_finite(c.as_slice(), iter + 1)?;
        }
    }

    let final_psnr = rec.psnr(ws.field())?;
    let hologram = ComplexGrid::new(c.shape().clone(), ws.hologram().to_vec())?;
    let displayed = intensity(&ComplexGrid::new(c.shape().clone(), ws.field().to_vec())?);
    Ok(SolveResult {
        algorithm: Algorithm::Wfcf,
        final_params: FinalParams::Cartesian(c),
        final_hologram: hologram,
        displayed,
        log: rec.log,
        trajectory: rec.trajectory,
        final_loss: loss,
        final_psnr,
    })
}
