use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beamsnet::data_io::{discover_missions, load_checkpoint, load_mission_meta, MissionKind};
use beamsnet::dvl::BeamErrorParams;
use beamsnet::model::{BeamsNetV1Config, BeamsNetV2Config, NetConfig, TrainConfig, Variant};
use beamsnet::seed::derive_seed;
use beamsnet::sim::fixture::FixtureSpec;
use beamsnet::sim::ImuErrorParams;
use beamsnet_cli::config::{
    DatasetSpec, EvalConfig, ExperimentConfig, FixtureConfig, SimulateConfig, SweepConfig, TrainRunConfig,
};
use beamsnet_cli::{run, CliError};
use clap::{Args, Parser, Subcommand};

/// Beam-level DVL velocity estimation experiments.
///
/// Every command writes `config.json` with its fully resolved parameters
/// next to its outputs; `beamsnet replay <config.json>` reruns it.
#[derive(Parser)]
#[command(name = "beamsnet", version)]
struct Cli {
    /// Root for default output directories (`<root>/<command>`).
    #[arg(long, env = "BEAMSNET_OUT", default_value = "runs", global = true)]
    out_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate straight-line missions, one per speed.
    Simulate(SimulateArgs),
    /// Generate a multi-mission fixture with recorded-style velocity logs.
    MakeFixture(FixtureArgs),
    /// Train a network on a mission directory.
    Train(TrainArgs),
    /// Evaluate a checkpoint and the LS baseline on the test split.
    Eval(EvalArgs),
    /// Train one BeamsNetV2 per number of past beam measurements.
    SweepPast(SweepArgs),
    /// Rerun a command from its saved config.json.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Vehicle speeds in m/s, comma separated.
    #[arg(long = "speed", value_delimiter = ',', default_values_t = vec![1.0, 2.0, 3.0])]
    speeds: Vec<f64>,
    /// Mission length in seconds.
    #[arg(long, default_value_t = 7200.0)]
    duration: f64,
    /// Direction of travel relative to body x, degrees.
    #[arg(long, default_value_t = 0.0)]
    heading_deg: f64,
    #[arg(long, default_value_t = 100.0)]
    imu_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    dvl_rate: f64,
    #[command(flatten)]
    beams: BeamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Beam geometry and error model.
#[derive(Args, Clone)]
struct BeamArgs {
    /// Beam pitch from the vertical, degrees.
    #[arg(long, default_value_t = 20.0)]
    alpha_deg: f64,
    /// Beam scale factor (0.007 = 0.7 %).
    #[arg(long, default_value_t = 0.007)]
    scale: f64,
    /// Beam bias, m/s.
    #[arg(long, default_value_t = 0.0001)]
    bias: f64,
    /// Beam white-noise standard deviation, m/s.
    #[arg(long, default_value_t = 0.042)]
    sigma: f64,
}

impl BeamArgs {
    fn params(&self, seed: u64) -> BeamErrorParams {
        BeamErrorParams {
            bias: [self.bias; 4],
            scale: [self.scale; 4],
            noise_std: self.sigma,
            seed,
        }
    }
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 9)]
    missions: usize,
    /// Per-mission length in seconds.
    #[arg(long, default_value_t = 400.0)]
    duration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How a mission directory becomes windows.
#[derive(Args, Clone)]
struct DataArgs {
    /// Mission directory, or a directory of mission directories.
    #[arg(long)]
    dataset: PathBuf,
    /// Past beams kept per window; fixes the first usable epoch.
    #[arg(long, default_value_t = 3)]
    n_past: usize,
    #[command(flatten)]
    beams: BeamArgs,
    /// Seed for re-corrupting velocity-only missions.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    /// Add white noise to recorded velocities before re-corruption, m/s.
    #[arg(long, num_args = 0..=1, default_missing_value = "0.0001")]
    pre_noise: Option<f64>,
}

impl DataArgs {
    fn spec(&self) -> DatasetSpec {
        DatasetSpec {
            path: self.dataset.clone(),
            n_past: self.n_past,
            alpha_deg: self.beams.alpha_deg,
            beam_errors: self.beams.params(self.data_seed),
            pre_noise_std: self.pre_noise,
        }
    }
}

/// Optimizer settings. Unset values come from the simulation preset
/// (η = 0.01, 30 epochs) or, when any mission is recorded, the recorded
/// preset (η = 0.001, 50 epochs).
#[derive(Args, Clone)]
struct OptimArgs {
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    /// Visit training windows in chronological order.
    #[arg(long)]
    no_shuffle: bool,
    /// Feed raw sequence inputs without per-channel standardization.
    #[arg(long)]
    no_standardize: bool,
}

impl OptimArgs {
    fn resolve(&self, dataset: &Path, seed: u64) -> Result<TrainConfig, CliError> {
        let train_seed = derive_seed(seed, "train", 0);
        let mut tc = if has_recorded(dataset)? {
            TrainConfig::recorded(train_seed)
        } else {
            TrainConfig::simulation(train_seed)
        };
        if let Some(lr) = self.lr {
            tc.learning_rate = lr;
        }
        if let Some(e) = self.epochs {
            tc.epochs = e;
        }
        if let Some(b) = self.batch {
            tc.batch_size = b;
        }
        tc.shuffle = !self.no_shuffle;
        tc.standardize_inputs = !self.no_standardize;
        Ok(tc)
    }
}

fn has_recorded(dataset: &Path) -> Result<bool, CliError> {
    for p in discover_missions(dataset)? {
        if load_mission_meta(&p)?.kind == MissionKind::Recorded {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_parser = ["v1", "v2"], default_value = "v2")]
    variant: String,
    /// Past beam measurements fed to BeamsNetV2 (defaults to --n-past).
    #[arg(long)]
    past: Option<usize>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    optim: OptimArgs,
    /// Seed for weight initialization, dropout and shuffling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Evaluate on another mission directory; other dataset settings are
    /// taken from the checkpoint.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Evaluate even if the dataset differs from the training dataset.
    #[arg(long)]
    allow_fingerprint_mismatch: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    min_n: usize,
    #[arg(long, default_value_t = 7)]
    max_n: usize,
    /// Mission directory, or a directory of mission directories.
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    beams: BeamArgs,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    #[arg(long, num_args = 0..=1, default_missing_value = "0.0001")]
    pre_noise: Option<f64>,
    #[command(flatten)]
    optim: OptimArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    config: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn out_dir(out: Option<PathBuf>, root: &Path, command: &str) -> PathBuf {
    out.unwrap_or_else(|| root.join(command))
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let root = cli.out_root;
    Ok(match cli.command {
        Command::Simulate(a) => ExperimentConfig::Simulate(SimulateConfig {
            speeds: a.speeds,
            duration: a.duration,
            heading_deg: a.heading_deg,
            imu_rate: a.imu_rate,
            dvl_rate: a.dvl_rate,
            alpha_deg: a.beams.alpha_deg,
            imu_errors: ImuErrorParams::default_with_seed(derive_seed(a.seed, "imu", 0)),
            beam_errors: a.beams.params(derive_seed(a.seed, "beams", 0)),
            seed: a.seed,
            out: out_dir(a.out, &root, "simulate"),
        }),
        Command::MakeFixture(a) => ExperimentConfig::MakeFixture(FixtureConfig {
            fixture: FixtureSpec {
                missions: a.missions,
                duration: a.duration,
                seed: derive_seed(a.seed, "fixture", 0),
                ..FixtureSpec::default()
            },
            imu_errors: ImuErrorParams::default_with_seed(derive_seed(a.seed, "imu", 0)),
            seed: a.seed,
            out: out_dir(a.out, &root, "fixture"),
        }),
        Command::Train(a) => {
            let variant: Variant = a.variant.parse().map_err(CliError::Config)?;
            let net = match variant {
                Variant::V1 => NetConfig::V1(BeamsNetV1Config::default()),
                Variant::V2 => NetConfig::V2(BeamsNetV2Config {
                    n_past: a.past.unwrap_or(a.data.n_past),
                    ..BeamsNetV2Config::default()
                }),
            };
            ExperimentConfig::Train(TrainRunConfig {
                train: a.optim.resolve(&a.data.dataset, a.seed)?,
                net,
                dataset: a.data.spec(),
                seed: a.seed,
                out: out_dir(a.out, &root, "train"),
            })
        }
        Command::Eval(a) => {
            let dataset = match a.dataset {
                None => None,
                Some(path) => {
                    let (_, meta) = load_checkpoint(&a.checkpoint)?;
                    let mut spec: DatasetSpec = serde_json::from_value(meta.extra["dataset"].clone())
                        .map_err(|_| CliError::Config("checkpoint does not record its dataset settings".into()))?;
                    spec.path = path;
                    Some(spec)
                }
            };
            ExperimentConfig::Eval(EvalConfig {
                checkpoint: a.checkpoint,
                dataset,
                allow_fingerprint_mismatch: a.allow_fingerprint_mismatch,
                out: out_dir(a.out, &root, "eval"),
            })
        }
        Command::SweepPast(a) => {
            let data = DataArgs {
                dataset: a.dataset,
                n_past: a.max_n,
                beams: a.beams,
                data_seed: a.data_seed,
                pre_noise: a.pre_noise,
            };
            ExperimentConfig::SweepPast(SweepConfig {
                train: a.optim.resolve(&data.dataset, a.seed)?,
                dataset: data.spec(),
                min_n: a.min_n,
                max_n: a.max_n,
                net: BeamsNetV2Config::default(),
                seed: a.seed,
                out: out_dir(a.out, &root, "sweep-past"),
            })
        }
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.config)
                .map_err(|e| CliError::Config(format!("{}: {e}", a.config.display())))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(out) = a.out {
                cfg.set_out(out);
            }
            cfg
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match resolve(cli).and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
