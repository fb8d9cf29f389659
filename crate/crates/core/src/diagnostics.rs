//! Numerical checks of the tangency, amplitude-bound and monotonicity
//! properties of WFCF, plus the oracles used to test the gradients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, SolverConfig};
use crate::error::{Error, Result};
use crate::gradients::LossNormalization;
use crate::grid::{ComplexGrid, GridShape, IntensityGrid};
use crate::init::{complex_gaussian, Stream};
use crate::propagation::{intensity, project_phase_only, propagate};
use crate::solvers::{run_wfcf_from, Trajectory};

/// Total variance of the feasible witness.
pub const WITNESS_VARIANCE: f64 = 0.04;

pub const THEOREM1_TOL: f64 = 1e-9;
pub const THEOREM2_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const MONOTONE_TOL: f64 = 1e-12;
pub const WIENER_KHINCHIN_TOL: f64 = 1e-8;

/// Gradients below this are treated as zero by the tangency check.
const GRAD_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub name: String,
    pub samples_checked: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_case: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn new(name: &str, samples: usize, max_violation: f64, tolerance: f64, worst_case: String) -> Self {
        Self {
            name: name.to_string(),
            samples_checked: samples,
            max_violation,
            tolerance,
            pass: max_violation <= tolerance,
            worst_case,
            notes: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {}: max violation {:.3e} (tolerance {:.1e}) over {} samples; worst: {}\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_violation,
            self.tolerance,
            self.samples_checked,
            self.worst_case
        );
        for n in &self.notes {
            s.push_str("  ");
            s.push_str(n);
            s.push('\n');
        }
        s
    }
}

/// Draws a witness `C` and returns it with `|W (C / |C|)|^2`, a target that
/// `C` reproduces exactly.
pub fn synthesize_feasible_target(shape: &GridShape, seed: u64) -> Result<(ComplexGrid, IntensityGrid)> {
    let witness = complex_gaussian(shape, seed, Stream::Witness, WITNESS_VARIANCE)?;
    let target = intensity(&propagate(&project_phase_only(&witness)?));
    Ok((witness, target))
}

/// Relative mismatch between `target` and the intensity produced by
/// `witness`, measured in the sum norm.
pub fn feasibility_residual(witness: &ComplexGrid, target: &IntensityGrid) -> Result<f64> {
    witness.shape().ensure_same(target.shape())?;
    let shown = intensity(&propagate(&project_phase_only(witness)?));
    let diff: f64 = shown
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(diff / target.sum().max(f64::MIN_POSITIVE))
}

fn gradient_snapshots(traj: &Trajectory) -> Result<()> {
    if traj.snapshots.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if traj.snapshots.iter().any(|s| s.grads.is_none()) {
        return Err(Error::WrongAlgorithm(traj.algorithm.name()));
    }
    Ok(())
}

/// Tangency: `|Re[grad conj(c)]| / (|grad| |c|)` over every snapshot entry
/// with a nonzero gradient.
pub fn check_theorem1(traj: &Trajectory) -> Result<TheoremReport> {
    gradient_snapshots(traj)?;
    if traj.algorithm != Algorithm::Wfcf {
        return Err(Error::WrongAlgorithm(traj.algorithm.name()));
    }
    let mut samples = 0;
    let mut worst = (0.0, String::from("none"));
    for snap in &traj.snapshots {
        let grads = snap.grads.as_ref().expect("checked above");
        for ((&n, c), g) in traj.indices.iter().zip(&snap.values).zip(grads) {
            let (gn, cn) = (g.norm(), c.norm());
            if gn <= GRAD_FLOOR {
                continue;
            }
            samples += 1;
            let v = (g * c.conj()).re.abs() / (gn * cn);
            if v > worst.0 || samples == 1 {
                worst = (v, format!("iter {} index {n}: c = {c:e}, grad = {g:e}", snap.iter));
            }
        }
    }
    Ok(TheoremReport::new("theorem1", samples, worst.0, THEOREM1_TOL, worst.1))
}

/// Amplitude bound `|grad_n| <= 1 / |c_n|` along a WFCF run on a feasible
/// target.
///
/// The run uses `cfg` (its own loss normalization) starting from the shared
/// initialization; gradients are rescaled to [`LossNormalization::InverseScaled`]
/// for the check. `witness` must reproduce `target`.
pub fn check_theorem2(target: &IntensityGrid, witness: &ComplexGrid, cfg: &SolverConfig) -> Result<TheoremReport> {
    let residual = feasibility_residual(witness, target)?;
    if residual > 1e-9 {
        return Err(Error::NotFeasible(format!(
            "witness intensity differs from the target by {residual:.3e} (relative)"
        )));
    }
    let n = target.shape().total();
    let run_norm = cfg.loss_normalization();
    let to_bound = LossNormalization::InverseScaled.factor(n) / run_norm.factor(n);
    let to_normalized = LossNormalization::Normalized.factor(n) / run_norm.factor(n);
    let mut samples = 0;
    let mut worst = (f64::NEG_INFINITY, String::from("none"));
    let mut ratio: f64 = 0.0;
    let mut ratio_normalized: f64 = 0.0;
    let c0 = crate::solvers::initial_parameters(target.shape(), cfg)?;
    run_wfcf_from(target, cfg, c0, |step| {
        for (i, (c, g)) in step.params.iter().zip(step.grad).enumerate() {
            let cn = c.norm();
            let gn = g.norm() * to_bound;
            samples += 1;
            let v = gn - 1.0 / cn;
            ratio = ratio.max(gn * cn);
            ratio_normalized = ratio_normalized.max(g.norm() * to_normalized * cn);
            if v > worst.0 {
                worst = (
                    v,
                    format!("iter {} index {i}: |grad| = {gn:.6e}, 1/|c| = {:.6e}", step.iter, 1.0 / cn),
                );
            }
        }
    })?;
    let mut report = TheoremReport::new("theorem2", samples, worst.0, THEOREM2_TOL, worst.1);
    report.notes.push(format!("max |grad|*|c| = {ratio:.6e} (bound 1)"));
    report.notes.push(format!(
        "with the 1/(8N^2) constant and unnormalized adjoint: max |grad|*|c| = {ratio_normalized:.6e} (informational)"
    ));
    Ok(report)
}

/// Monotone amplitudes and the step identity
/// `|c[tau+1]|^2 - |c[tau]|^2 = alpha^2 |grad[tau]|^2`.
///
/// Returns the identity report followed by the monotonicity report (which
/// also covers `min_n |c_n[tau]| >= min_n |c_n[0]|` over the tracked indices).
pub fn check_corollary1(traj: &Trajectory, alpha: f64) -> Result<Vec<TheoremReport>> {
    gradient_snapshots(traj)?;
    if traj.algorithm != Algorithm::Wfcf {
        return Err(Error::WrongAlgorithm(traj.algorithm.name()));
    }
    if traj.stride != 1
        || traj
            .snapshots
            .windows(2)
            .any(|w| w[1].iter != w[0].iter + 1)
    {
        return Err(Error::NonConsecutive { stride: traj.stride });
    }
    let mut id_samples = 0;
    let mut id_worst = (0.0, String::from("none"));
    let mut mono_worst = (0.0, String::from("none"));
    let min0 = traj.snapshots[0]
        .values
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    for w in traj.snapshots.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let grads = a.grads.as_ref().expect("checked above");
        for (((&n, c0), c1), g) in traj.indices.iter().zip(&a.values).zip(&b.values).zip(grads) {
            id_samples += 1;
            let (r0, r1) = (c0.norm_sqr(), c1.norm_sqr());
            let step = alpha * alpha * g.norm_sqr();
            let e = ((r1 - r0) - step).abs() / r1;
            if e > id_worst.0 {
                id_worst = (
                    e,
                    format!(
                        "iter {} index {n}: |c'|^2 - |c|^2 = {:.6e}, alpha^2|grad|^2 = {step:.6e}",
                        a.iter,
                        r1 - r0
                    ),
                );
            }
            let d = (c0.norm() - c1.norm()) / c0.norm();
            if d > mono_worst.0 {
                mono_worst = (d, format!("iter {} index {n}: |c| fell from {:.6e} to {:.6e}", a.iter, c0.norm(), c1.norm()));
            }
        }
        let m = b.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let d = (min0 - m) / min0;
        if d > mono_worst.0 {
            mono_worst = (d, format!("iter {}: min |c| = {m:.6e} below initial {min0:.6e}", b.iter));
        }
    }
    Ok(vec![
        TheoremReport::new("corollary1-identity", id_samples, id_worst.0, IDENTITY_TOL, id_worst.1),
        TheoremReport::new("corollary1-monotone", id_samples, mono_worst.0, MONOTONE_TOL, mono_worst.1),
    ])
}

/// Max absolute deviation between `|W h|^2` and the transform of the
/// circular autocorrelation `a_k = sum_n h_{n+k} conj(h_n)`, the latter
/// summed directly.
pub fn wiener_khinchin_check(h: &ComplexGrid) -> f64 {
    let shape = h.shape();
    let (rows, cols) = shape.rows_cols();
    let v = h.as_slice();
    let mut auto = ComplexGrid::zeros(shape.clone());
    for (k, a) in auto.as_mut_slice().iter_mut().enumerate() {
        let (kr, kc) = (k / cols, k % cols);
        let mut s = Complex64::new(0.0, 0.0);
        for nr in 0..rows {
            let sr = ((nr + kr) % rows) * cols;
            for nc in 0..cols {
                s += v[sr + (nc + kc) % cols] * v[nr * cols + nc].conj();
            }
        }
        *a = s;
    }
    let spectrum = propagate(&auto);
    let shown = intensity(&propagate(h));
    shown
        .as_slice()
        .iter()
        .zip(spectrum.as_slice())
        .map(|(i, s)| (s - Complex64::new(*i, 0.0)).norm())
        .fold(0.0, f64::max)
}

/// [`wiener_khinchin_check`] as a report with an absolute tolerance.
pub fn wiener_khinchin_report(h: &ComplexGrid) -> TheoremReport {
    let d = wiener_khinchin_check(h);
    TheoremReport::new(
        "wiener-khinchin",
        h.len(),
        d,
        WIENER_KHINCHIN_TOL,
        format!("max |spectrum - intensity| = {d:.3e} on {}", h.shape()),
    )
}

/// Central-difference Wirtinger derivative `(d/da + j d/db) / 2` of a real
/// function at every entry of `c`.
pub fn finite_difference_wirtinger(lossfn: impl Fn(&ComplexGrid) -> f64, c: &ComplexGrid, step: f64) -> ComplexGrid {
    let mut probe = c.clone();
    let mut out = ComplexGrid::zeros(c.shape().clone());
    for n in 0..c.len() {
        let z = c.as_slice()[n];
        let mut diff = |dz: Complex64| {
            probe.as_mut_slice()[n] = z + dz;
            let up = lossfn(&probe);
            probe.as_mut_slice()[n] = z - dz;
            let down = lossfn(&probe);
            probe.as_mut_slice()[n] = z;
            (up - down) / (2.0 * step)
        };
        let da = diff(Complex64::new(step, 0.0));
        let db = diff(Complex64::new(0.0, step));
        out.as_mut_slice()[n] = Complex64::new(da, db) / 2.0;
    }
    out
}

/// Negative control: replaces every recorded gradient by a radial vector of
/// the same length, which the tangency check must reject.
pub fn inject_radial_fault(traj: &mut Trajectory) {
    for snap in &mut traj.snapshots {
        if let Some(grads) = &mut snap.grads {
            for (g, c) in grads.iter_mut().zip(&snap.values) {
                let r = c.norm();
                if r > 0.0 {
                    *g = c * (g.norm() / r);
                }
            }
        }
    }
}
