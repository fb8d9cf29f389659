//! Loss and gradients for the Cartesian (WFCF) and polar (WFPF)
//! parameterizations.
//!
//! With `h = c / |c|`, `p = W h`, residual `R_m = |p_m|^2 - |i_m|^2` and
//! `t = W^H (R . p)`, the raw loss is `sum_m R_m^2` and the Cartesian
//! gradient is
//!
//! ```text
//! grad_n = 4j (h_n / |c_n|) Im[t_n conj(h_n)]
//! ```
//!
//! which is `dL/da_n + j dL/db_n`, twice the Wirtinger derivative with
//! respect to `conj(c_n)`. It is always orthogonal to `c_n` in the complex
//! plane. The polar gradient is `dL/dphi_n = 4 Im[s_n exp(-j phi_n)]`, with
//! `s` computed like `t` from `h = exp(j phi)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, IntensityGrid, PhaseGrid};
use crate::propagation::Propagator;

/// Constant multiplying the loss and its gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossNormalization {
    /// `sum_m R_m^2`, no constant.
    Raw,
    /// `1 / (8 N^2)`, the constant of the Cartesian loss. Gradient
    /// magnitudes are O(1) independent of `N`, which makes learning rates
    /// portable across resolutions.
    #[default]
    Normalized,
    /// `1 / (8 N^3)`: the `1 / (8 N^2)` constant with the adjoint replaced by
    /// the `1/N`-normalized inverse transform. The amplitude bound
    /// `|grad_n| <= 1 / |c_n|` on feasible targets holds in this scaling.
    InverseScaled,
}

impl LossNormalization {
    pub fn factor(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            LossNormalization::Raw => 1.0,
            LossNormalization::Normalized => 1.0 / (8.0 * n * n),
            LossNormalization::InverseScaled => 1.0 / (8.0 * n * n * n),
        }
    }
}

/// Reusable buffers for repeated loss/gradient evaluation on one target.
#[derive(Debug, Clone)]
pub struct GradientWorkspace<'a> {
    prop: &'a Propagator,
    target: &'a IntensityGrid,
    hologram: Vec<Complex64>,
    field: Vec<Complex64>,
    back: Vec<Complex64>,
}

impl<'a> GradientWorkspace<'a> {
    pub fn new(prop: &'a Propagator, target: &'a IntensityGrid) -> Result<Self> {
        prop.shape().ensure_same(target.shape())?;
        let n = prop.len();
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            prop,
            target,
            hologram: vec![zero; n],
            field: vec![zero; n],
            back: vec![zero; n],
        })
    }

    pub fn propagator(&self) -> &Propagator {
        self.prop
    }

    /// Propagated field `p` of the last evaluation.
    pub fn field(&self) -> &[Complex64] {
        &self.field
    }

    /// Unit-amplitude hologram `h` of the last evaluation.
    pub fn hologram(&self) -> &[Complex64] {
        &self.hologram
    }

    /// Propagates the current `hologram` buffer and returns the raw loss.
    /// When `backprop` is set, also fills `back` with `W^H (R . p)`.
    fn forward_backward(&mut self, backprop: bool) -> f64 {
        self.field.copy_from_slice(&self.hologram);
        self.prop.forward_in_place(&mut self.field);
        let mut loss = 0.0;
        for ((b, p), t) in self.back.iter_mut().zip(&self.field).zip(self.target.as_slice()) {
            let r = p.norm_sqr() - t;
            loss += r * r;
            *b = p * r;
        }
        if backprop {
            self.prop.adjoint_in_place(&mut self.back);
        }
        loss
    }

    fn load_cartesian(&mut self, c: &[Complex64]) -> Result<()> {
        if c.len() != self.hologram.len() {
            return Err(Error::DimensionMismatch {
                declared: self.hologram.len(),
                actual: c.len(),
            });
        }
        for (index, (h, z)) in self.hologram.iter_mut().zip(c).enumerate() {
            let r = z.norm();
            if r == 0.0 {
                return Err(Error::ZeroAmplitude { index });
            }
            *h = z / r;
        }
        Ok(())
    }

    fn load_phases(&mut self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.hologram.len() {
            return Err(Error::DimensionMismatch {
                declared: self.hologram.len(),
                actual: phi.len(),
            });
        }
        for (h, &p) in self.hologram.iter_mut().zip(phi) {
            *h = Complex64::from_polar(1.0, p);
        }
        Ok(())
    }

    pub fn cartesian_loss(&mut self, c: &[Complex64], norm: LossNormalization) -> Result<f64> {
        self.load_cartesian(c)?;
        Ok(norm.factor(c.len()) * self.forward_backward(false))
    }

    pub fn polar_loss(&mut self, phi: &[f64], norm: LossNormalization) -> Result<f64> {
        self.load_phases(phi)?;
        Ok(norm.factor(phi.len()) * self.forward_backward(false))
    }

    /// Loss and Cartesian gradient at `c`; the gradient is written to `grad`.
    pub fn cartesian(
        &mut self,
        c: &[Complex64],
        norm: LossNormalization,
        grad: &mut [Complex64],
    ) -> Result<f64> {
        self.load_cartesian(c)?;
        let k = norm.factor(c.len());
        let loss = k * self.forward_backward(true);
        for (((g, z), h), t) in grad.iter_mut().zip(c).zip(&self.hologram).zip(&self.back) {
            let im = (t * h.conj()).im;
            *g = Complex64::new(0.0, 4.0 * k * im / z.norm()) * h;
        }
        Ok(loss)
    }

    /// Loss and phase gradient at `phi`; the gradient is written to `grad`.
    pub fn polar(&mut self, phi: &[f64], norm: LossNormalization, grad: &mut [f64]) -> Result<f64> {
        self.load_phases(phi)?;
        let k = norm.factor(phi.len());
        let loss = k * self.forward_backward(true);
        for ((g, h), s) in grad.iter_mut().zip(&self.hologram).zip(&self.back) {
            *g = 4.0 * k * (s * h.conj()).im;
        }
        Ok(loss)
    }
}

pub fn loss(c: &ComplexGrid, target: &IntensityGrid, norm: LossNormalization) -> Result<f64> {
    let prop = Propagator::new(c.shape());
    GradientWorkspace::new(&prop, target)?.cartesian_loss(c.as_slice(), norm)
}

pub fn polar_loss(phi: &PhaseGrid, target: &IntensityGrid, norm: LossNormalization) -> Result<f64> {
    let prop = Propagator::new(phi.shape());
    GradientWorkspace::new(&prop, target)?.polar_loss(phi.as_slice(), norm)
}

pub fn wfcf_gradient(
    c: &ComplexGrid,
    target: &IntensityGrid,
    norm: LossNormalization,
) -> Result<ComplexGrid> {
    let prop = Propagator::new(c.shape());
    let mut grad = ComplexGrid::zeros(c.shape().clone());
    GradientWorkspace::new(&prop, target)?.cartesian(c.as_slice(), norm, grad.as_mut_slice())?;
    Ok(grad)
}

pub fn wfpf_gradient(
    phi: &PhaseGrid,
    target: &IntensityGrid,
    norm: LossNormalization,
) -> Result<Vec<f64>> {
    let prop = Propagator::new(phi.shape());
    let mut grad = vec![0.0; phi.as_slice().len()];
    GradientWorkspace::new(&prop, target)?.polar(phi.as_slice(), norm, &mut grad)?;
    Ok(grad)
}

/// Wirtinger derivative of `c / |c|` with respect to `conj(c)`:
/// `-(1/2) (1/|c|) (c/|c|)^2`.
pub fn unit_phasor_derivative(c: Complex64) -> Result<Complex64> {
    let r = c.norm();
    if r == 0.0 {
        return Err(Error::ZeroAmplitude { index: 0 });
    }
    let u = c / r;
    Ok(-0.5 / r * u * u)
}

/// Wirtinger derivative of `conj(c) / |c|` with respect to `conj(c)`:
/// `(1/2) (1/|c|)`.
pub fn conj_unit_phasor_derivative(c: Complex64) -> Result<Complex64> {
    let r = c.norm();
    if r == 0.0 {
        return Err(Error::ZeroAmplitude { index: 0 });
    }
    Ok(Complex64::new(0.5 / r, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridShape;
    use crate::propagation::{intensity, project_phase_only, propagate};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(v: Vec<Complex64>) -> ComplexGrid {
        ComplexGrid::new(GridShape::d1(v.len()).unwrap(), v).unwrap()
    }

    fn target(v: Vec<f64>) -> IntensityGrid {
        IntensityGrid::new(GridShape::d1(v.len()).unwrap(), v).unwrap()
    }

    #[test]
    fn feasible_point_has_zero_loss_and_gradient() {
        let cs = grid(vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.1, 0.2), c(1.0, 1.0), c(0.0, -3.0)]);
        let t = intensity(&propagate(&project_phase_only(&cs).unwrap()));
        assert!(loss(&cs, &t, LossNormalization::Raw).unwrap() < 1e-20);
        let g = wfcf_gradient(&cs, &t, LossNormalization::Raw).unwrap();
        assert!(g.max_amplitude() < 1e-12);
    }

    #[test]
    fn single_element_is_phase_invariant() {
        let cs = grid(vec![c(2.0, 0.0)]);
        assert_eq!(loss(&cs, &target(vec![1.0]), LossNormalization::Raw).unwrap(), 0.0);
        let g = wfcf_gradient(&grid(vec![c(0.3, -0.7)]), &target(vec![5.0]), LossNormalization::Raw)
            .unwrap();
        assert!(g.as_slice()[0].norm() < 1e-15);
    }

    #[test]
    fn dc_against_zero_target() {
        let l = loss(&grid(vec![c(1.0, 0.0); 4]), &target(vec![0.0; 4]), LossNormalization::Raw)
            .unwrap();
        assert!((l - 256.0).abs() < 1e-10);
    }

    #[test]
    fn normalization_factors() {
        let cs = grid(vec![c(1.0, 0.2), c(-0.4, 1.0), c(0.3, 0.3), c(1.0, -2.0)]);
        let t = target(vec![1.0, 5.0, 2.0, 8.0]);
        let raw = loss(&cs, &t, LossNormalization::Raw).unwrap();
        let nrm = loss(&cs, &t, LossNormalization::Normalized).unwrap();
        assert!((nrm - raw / 128.0).abs() <= 1e-15 * raw);
        let g_raw = wfcf_gradient(&cs, &t, LossNormalization::Raw).unwrap();
        let g_inv = wfcf_gradient(&cs, &t, LossNormalization::InverseScaled).unwrap();
        for (a, b) in g_raw.as_slice().iter().zip(g_inv.as_slice()) {
            assert!((a / 512.0 - b).norm() <= 1e-15 * a.norm());
        }
    }

    #[test]
    fn zero_amplitude_errors() {
        let t = target(vec![1.0, 1.0]);
        let cs = grid(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            wfcf_gradient(&cs, &t, LossNormalization::Raw),
            Err(Error::ZeroAmplitude { index: 1 })
        ));
        assert!(loss(&cs, &t, LossNormalization::Raw).is_err());
    }

    #[test]
    fn unit_phasor_derivative_values() {
        assert!((unit_phasor_derivative(c(1.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-16);
        assert!((unit_phasor_derivative(c(0.0, 1.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-16);
        assert!((conj_unit_phasor_derivative(c(1.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-16);
        assert!((conj_unit_phasor_derivative(c(0.0, 2.0)).unwrap() - c(0.25, 0.0)).norm() < 1e-16);
        assert!(unit_phasor_derivative(c(0.0, 0.0)).is_err());
        assert!(conj_unit_phasor_derivative(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn feasible_phase_target_has_zero_gradient() {
        let phi = PhaseGrid::new(GridShape::d1(6).unwrap(), vec![0.1, 2.0, 4.0, 1.0, 5.5, 3.3]).unwrap();
        let t = intensity(&propagate(&phi.to_hologram()));
        let g = wfpf_gradient(&phi, &t, LossNormalization::Raw).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-10));
    }
}
