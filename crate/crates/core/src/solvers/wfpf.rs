use num_complex::Complex64;

use super::adam::{adam_step_into, AdamState};
use super::{check_setup, initial_parameters, max_abs, FinalParams, Recorder, SolveResult};
use crate::config::{Algorithm, SolverConfig};
use crate::error::{Error, Result};
use crate::gradients::GradientWorkspace;
use crate::grid::{ComplexGrid, IntensityGrid, PhaseGrid};
use crate::init::init_phase_from;
use crate::propagation::{intensity, Propagator};

/// Gradient descent on the phases, with a fixed rate (`Wfpf`) or Adam
/// (`WfpfAdam`). Starts from the phases of the shared Cartesian draw.
pub fn run_wfpf(target: &IntensityGrid, cfg: &SolverConfig) -> Result<SolveResult> {
    check_setup(target, cfg, &[Algorithm::Wfpf, Algorithm::WfpfAdam])?;
    let phi0 = init_phase_from(&initial_parameters(target.shape(), cfg)?)?;
    run_wfpf_from(target, cfg, phi0)
}

pub fn run_wfpf_from(target: &IntensityGrid, cfg: &SolverConfig, phi0: PhaseGrid) -> Result<SolveResult> {
    check_setup(target, cfg, &[Algorithm::Wfpf, Algorithm::WfpfAdam])?;
    target.shape().ensure_same(phi0.shape())?;
    let norm = cfg.loss_normalization();
    let prop = Propagator::new(target.shape());
    let mut ws = GradientWorkspace::new(&prop, target)?;
    let mut rec = Recorder::new(target, cfg);
    let n = target.shape().total();
    let mut phi = phi0;
    let mut grad = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut adam = (cfg.algorithm == Algorithm::WfpfAdam).then(|| AdamState::new(n));
    let last = cfg.iterations - 1;
    let mut loss = 0.0;

    for iter in 0..=last {
        loss = ws.polar(phi.as_slice(), norm, &mut grad)?;
        rec.check(iter, loss)?;
        if rec.due(iter) {
            let h = ws.hologram();
            rec.record(
                iter,
                loss,
                ws.field(),
                None,
                Some(max_abs(&grad, f64::abs)),
                |i| h[i],
                Some(&|i| Complex64::new(grad[i], 0.0)),
            )?;
        }
        if iter < last {
            match &mut adam {
                Some(state) => adam_step_into(state, &grad, cfg.learning_rate, &cfg.adam, &mut step)?,
                None => {
                    for (s, g) in step.iter_mut().zip(&grad) {
                        *s = cfg.learning_rate * g;
                    }
                }
            }
            if step.iter().any(|s| !s.is_finite()) {
                return Err(Error::Divergence { iteration: iter + 1 });
            }
            phi.descend(&step);
        }
    }

    let shape = target.shape().clone();
    let final_psnr = rec.psnr(ws.field())?;
    let hologram = ComplexGrid::new(shape.clone(), ws.hologram().to_vec())?;
    let displayed = intensity(&ComplexGrid::new(shape, ws.field().to_vec())?);
    Ok(SolveResult {
        algorithm: cfg.algorithm,
        final_params: FinalParams::Phase(phi),
        final_hologram: hologram,
        displayed,
        log: rec.log,
        trajectory: rec.trajectory,
        final_loss: loss,
        final_psnr,
    })
}
