use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradients::LossNormalization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Wfcf,
    Wfpf,
    WfpfAdam,
    Gs,
    Kaczmarz,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Gs,
        Algorithm::Kaczmarz,
        Algorithm::Wfpf,
        Algorithm::WfpfAdam,
        Algorithm::Wfcf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Wfcf => "wfcf",
            Algorithm::Wfpf => "wfpf",
            Algorithm::WfpfAdam => "wfpf-adam",
            Algorithm::Gs => "gs",
            Algorithm::Kaczmarz => "kaczmarz",
        }
    }

    /// Whether the learning rate affects this algorithm.
    pub fn uses_learning_rate(self) -> bool {
        matches!(self, Algorithm::Wfcf | Algorithm::Wfpf | Algorithm::WfpfAdam)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config(format!(
                "adam betas must lie in [0, 1), got ({}, {})",
                self.beta1, self.beta2
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!("adam epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub learning_rate: f64,
    /// Number of iterates `T`; `T - 1` updates are applied.
    pub iterations: usize,
    pub seed: u64,
    /// Variance of each real component of the initial `c_n`.
    pub init_variance: f64,
    /// Scale loss and gradients by `1 / (8 N^2)`.
    pub normalize_loss: bool,
    pub adam: AdamParams,
    pub log_stride: usize,
    /// Linear indices to record in the trajectory; `None` disables it.
    pub snapshot_indices: Option<Vec<usize>>,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            learning_rate: 1e-2,
            iterations: 1000,
            seed: 0,
            init_variance: 0.01,
            normalize_loss: true,
            adam: AdamParams::default(),
            log_stride: 1,
            snapshot_indices: None,
        }
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = lr;
        self
    }

    pub fn with_iterations(mut self, t: usize) -> Self {
        self.iterations = t;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_log_stride(mut self, stride: usize) -> Self {
        self.log_stride = stride;
        self
    }

    pub fn tracking(mut self, indices: Vec<usize>) -> Self {
        self.snapshot_indices = Some(indices);
        self
    }

    pub fn loss_normalization(&self) -> LossNormalization {
        if self.normalize_loss {
            LossNormalization::Normalized
        } else {
            LossNormalization::Raw
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(self.init_variance > 0.0 && self.init_variance.is_finite()) {
            return Err(Error::Config(format!(
                "init variance must be positive, got {}",
                self.init_variance
            )));
        }
        if self.log_stride == 0 {
            return Err(Error::Config("log stride must be at least 1".into()));
        }
        self.adam.validate()
    }
}

/// Scalars logged at one iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub loss: f64,
    pub psnr_db: f64,
    /// `min_n |c_n|`, WFCF only.
    pub min_amp: Option<f64>,
    /// `max_n |grad_n|`, gradient methods only.
    pub max_grad_amp: Option<f64>,
    pub elapsed_ms: f64,
}
