//! Resolved experiment configurations. Every command writes its config as
//! `config.json` next to its outputs; `beamsnet replay config.json` reruns it.

use std::path::PathBuf;

use beamsnet::dvl::BeamErrorParams;
use beamsnet::model::{BeamsNetV2Config, NetConfig, TrainConfig};
use beamsnet::sim::fixture::FixtureSpec;
use beamsnet::sim::ImuErrorParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Simulate(SimulateConfig),
    MakeFixture(FixtureConfig),
    Train(TrainRunConfig),
    Eval(EvalConfig),
    SweepPast(SweepConfig),
}

impl ExperimentConfig {
    pub fn out(&self) -> &PathBuf {
        match self {
            ExperimentConfig::Simulate(c) => &c.out,
            ExperimentConfig::MakeFixture(c) => &c.out,
            ExperimentConfig::Train(c) => &c.out,
            ExperimentConfig::Eval(c) => &c.out,
            ExperimentConfig::SweepPast(c) => &c.out,
        }
    }

    pub fn set_out(&mut self, out: PathBuf) {
        match self {
            ExperimentConfig::Simulate(c) => c.out = out,
            ExperimentConfig::MakeFixture(c) => c.out = out,
            ExperimentConfig::Train(c) => c.out = out,
            ExperimentConfig::Eval(c) => c.out = out,
            ExperimentConfig::SweepPast(c) => c.out = out,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    /// m/s, one mission per entry.
    pub speeds: Vec<f64>,
    /// s
    pub duration: f64,
    pub heading_deg: f64,
    pub imu_rate: f64,
    pub dvl_rate: f64,
    pub alpha_deg: f64,
    pub imu_errors: ImuErrorParams,
    pub beam_errors: BeamErrorParams,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureConfig {
    pub fixture: FixtureSpec,
    pub imu_errors: ImuErrorParams,
    pub seed: u64,
    pub out: PathBuf,
}

/// How to turn a directory of missions into windows. Missions that carry
/// beam columns are used as-is; velocity-only missions are re-corrupted
/// with `beam_errors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// Past beams kept in every window; fixes the first usable epoch.
    pub n_past: usize,
    pub alpha_deg: f64,
    pub beam_errors: BeamErrorParams,
    /// Perturb recorded velocities before re-corruption, m/s.
    pub pre_noise_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRunConfig {
    pub net: NetConfig,
    pub dataset: DatasetSpec,
    pub train: TrainConfig,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub checkpoint: PathBuf,
    /// `None` rebuilds the dataset recorded in the checkpoint.
    pub dataset: Option<DatasetSpec>,
    pub allow_fingerprint_mismatch: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Built once with `n_past = max_n` and shared by every entry.
    pub dataset: DatasetSpec,
    pub min_n: usize,
    pub max_n: usize,
    /// Template; `n_past` is replaced per entry.
    pub net: BeamsNetV2Config,
    pub train: TrainConfig,
    pub seed: u64,
    pub out: PathBuf,
}
