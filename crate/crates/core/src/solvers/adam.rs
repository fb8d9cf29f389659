use serde::{Deserialize, Serialize};

use crate::config::AdamParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam step. Returns the update, which the caller
/// subtracts from the parameters.
pub fn adam_step(state: &mut AdamState, grad: &[f64], lr: f64, params: &AdamParams) -> Result<Vec<f64>> {
    let mut update = vec![0.0; grad.len()];
    adam_step_into(state, grad, lr, params, &mut update)?;
    Ok(update)
}

pub(crate) fn adam_step_into(
    state: &mut AdamState,
    grad: &[f64],
    lr: f64,
    params: &AdamParams,
    update: &mut [f64],
) -> Result<()> {
    if grad.len() != state.m.len() || update.len() != grad.len() {
        return Err(Error::DimensionMismatch {
            declared: state.m.len(),
            actual: grad.len(),
        });
    }
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - params.beta1.powi(t);
    let c2 = 1.0 - params.beta2.powi(t);
    for (((m, v), &g), u) in state.m.iter_mut().zip(&mut state.v).zip(grad).zip(update) {
        *m = params.beta1 * *m + (1.0 - params.beta1) * g;
        *v = params.beta2 * *v + (1.0 - params.beta2) * g * g;
        *u = lr * (*m / c1) / ((*v / c2).sqrt() + params.epsilon);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_gives_zero_update() {
        let mut s = AdamState::new(3);
        let u = adam_step(&mut s, &[0.0; 3], 0.1, &AdamParams::default()).unwrap();
        assert_eq!(u, vec![0.0; 3]);
        assert_eq!(s.steps(), 1);
    }

    #[test]
    fn first_step_by_hand() {
        // m = 0.1 g, v = 0.001 g^2; corrected m = g, v = g^2
        let p = AdamParams::default();
        let mut s = AdamState::new(3);
        let g = [0.5, -2.0, 1e-3];
        let u = adam_step(&mut s, &g, 0.01, &p).unwrap();
        for (ui, gi) in u.iter().zip(g) {
            let expect = 0.01 * gi / (gi.abs() + 1e-8);
            assert!((ui - expect).abs() < 1e-15, "{ui} vs {expect}");
        }
        assert!((s.first_moment()[1] + 0.2).abs() < 1e-15);
        assert!((s.second_moment()[1] - 0.004).abs() < 1e-15);
    }

    #[test]
    fn counter_and_finiteness() {
        let mut s = AdamState::new(1);
        let p = AdamParams::default();
        adam_step(&mut s, &[0.3], 0.1, &p).unwrap();
        let u = adam_step(&mut s, &[0.3], 0.1, &p).unwrap();
        assert!(u[0].is_finite() && u[0] >= 0.0);
        assert_eq!(s.steps(), 2);
        assert!(s.second_moment().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn length_mismatch() {
        let mut s = AdamState::new(2);
        assert!(adam_step(&mut s, &[1.0], 0.1, &AdamParams::default()).is_err());
    }
}
