use num_complex::Complex64;

use super::{check_setup, ensure_finite, initial_parameters, FinalParams, Recorder, SolveResult};
use crate::config::{Algorithm, SolverConfig};
use crate::error::Result;
use crate::grid::{ComplexGrid, IntensityGrid};
use crate::propagation::{intensity, project_in_place, Propagator};

/// Gerchberg-Saxton: alternate between imposing the target magnitudes in the
/// image plane and unit amplitude in the hologram plane.
pub fn run_gs(target: &IntensityGrid, cfg: &SolverConfig) -> Result<SolveResult> {
    check_setup(target, cfg, &[Algorithm::Gs])?;
    let mut h = initial_parameters(target.shape(), cfg)?;
    project_in_place(h.as_mut_slice())?;
    run_gs_from(target, cfg, h)
}

pub(crate) fn run_gs_from(target: &IntensityGrid, cfg: &SolverConfig, h0: ComplexGrid) -> Result<SolveResult> {
    target.shape().ensure_same(h0.shape())?;
    let prop = Propagator::new(target.shape());
    let k = cfg.loss_normalization().factor(target.shape().total());
    let n = target.shape().total() as f64;
    let amp: Vec<f64> = target.as_slice().iter().map(|t| t.sqrt()).collect();
    let mut rec = Recorder::new(target, cfg);
    let mut h = h0;
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
            let mut u = p.clone();
            for (q, a) in u.as_mut_slice().iter_mut().zip(&amp) {
                let r = q.norm();
                *q = if r > 0.0 { *q * (a / r) } else { Complex64::new(*a, 0.0) };
            }
            prop.adjoint_in_place(u.as_mut_slice());
            for (hn, un) in h.as_mut_slice().iter_mut().zip(u.as_slice()) {
                let un = un / n;
                let r = un.norm();
                if r > 0.0 {
                    *hn = un / r;
                }
            }
            ensure_finite(h.as_slice(), iter + 1)?;
        }
    }

    let displayed = intensity(&p);
    let final_psnr = rec.psnr(p.as_slice())?;
    Ok(SolveResult {
        algorithm: Algorithm::Gs,
        final_params: FinalParams::Cartesian(h.clone()),
        final_hologram: h,
        displayed,
        log: rec.log,
        trajectory: rec.trajectory,
        final_loss: loss,
        final_psnr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridShape;

    #[test]
    fn dc_fixed_point() {
        let shape = GridShape::d1(4).unwrap();
        let target = IntensityGrid::new(shape.clone(), vec![16.0, 0.0, 0.0, 0.0]).unwrap();
        let h0 = ComplexGrid::new(shape, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        let cfg = SolverConfig::new(Algorithm::Gs).with_iterations(5);
        let res = run_gs_from(&target, &cfg, h0.clone()).unwrap();
        assert!(res.log.iter().all(|r| r.loss == 0.0));
        for (a, b) in res.final_hologram.as_slice().iter().zip(h0.as_slice()) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
