//! DVL velocity estimation from raw beam measurements.
//!
//! The crate covers the whole pipeline:
//!
//! - [`dvl`]: Janus beam geometry, the beam error model and the
//!   pseudo-inverse least-squares estimator used as the baseline.
//! - [`sim`]: constant-speed trajectories with synchronized IMU/DVL streams,
//!   recorded-style mission fixtures, and windowed datasets.
//! - [`nn`]: a small f64 neural-network engine (dense, conv1d, dropout,
//!   activations, MSE, RMSprop, Kaiming init, finite-difference checks).
//! - [`model`]: the two regressor architectures and their training loop.
//! - [`metrics`]: RMSE, MAE, R² and VAF over velocity norms.
//! - [`data_io`]: mission tables, re-corruption of recorded missions and
//!   checkpoints.
//!
//! Randomness is always passed in explicitly as a [`seed::Rng`]; nothing in
//! the crate holds global RNG state.

// Parameter checks use `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data_io;
pub mod dvl;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod par;
pub mod seed;
pub mod sim;

pub use dvl::{BeamErrorParams, BeamGeometry, BeamVector, BodyVelocity};
pub use metrics::EvalReport;
pub use model::{BeamsNet, BeamsNetV1Config, BeamsNetV2Config, TrainConfig, TrainLog, Variant};
pub use sim::{Dataset, SampleWindow};
