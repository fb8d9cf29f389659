//! Phase-only hologram optimization for far-field display.
//!
//! The main method is Wirtinger flow on auxiliary Cartesian parameters `c_n`,
//! whose phase-only projection `c_n / |c_n|` is the hologram. Gradient descent
//! on the phases directly (with a fixed rate or Adam), Gerchberg-Saxton and a
//! randomized Kaczmarz solver are provided as baselines, along with checkers
//! for the geometric properties of the Cartesian iteration.
//!
//! ```
//! use holoflow::{diagnostics, solvers, Algorithm, GridShape, SolverConfig};
//!
//! let shape = GridShape::d1(32).unwrap();
//! let (_witness, target) = diagnostics::synthesize_feasible_target(&shape, 0).unwrap();
//! let cfg = SolverConfig::new(Algorithm::Wfcf).with_iterations(50);
//! let res = solvers::run_wfcf(&target, &cfg).unwrap();
//! assert!(res.final_loss < res.log[0].loss);
//! ```

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod gradients;
pub mod grid;
pub mod imageio;
pub mod init;
pub mod metrics;
pub mod propagation;
pub mod solvers;

pub use config::{AdamParams, Algorithm, IterationRecord, SolverConfig};
pub use error::{Error, Result};
pub use gradients::LossNormalization;
pub use grid::{ComplexGrid, GridShape, IntensityGrid, PhaseGrid};
pub use num_complex::Complex64;
pub use propagation::Propagator;
pub use solvers::{SolveResult, Trajectory};
