//! Experiment driver behind the `beamsnet` binary: simulation, fixture
//! generation, training, evaluation and past-window sweeps. Every command
//! writes its resolved [`ExperimentConfig`] as `config.json` next to its
//! outputs.

pub mod commands;
pub mod config;
pub mod plot;

pub use commands::{cmd_eval, cmd_make_fixture, cmd_simulate, cmd_sweep_past, cmd_train, run};
pub use config::ExperimentConfig;

/// Exit status for invalid configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures while running a valid configuration.
pub const EXIT_RUNTIME: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}

runtime_from!(
    beamsnet::data_io::DataError,
    beamsnet::model::ModelError,
    beamsnet::model::TrainError,
    beamsnet::metrics::MetricsError,
    beamsnet::sim::SimError
);
