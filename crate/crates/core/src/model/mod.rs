//! The two regressor architectures.
//!
//! V1 (IMU + current beams):
//!
//! ```text
//! accel [L×3] ─ conv1d(k, F) ─ ReLU ─ flatten ─┐
//! gyro  [L×3] ─ conv1d(k, F) ─ ReLU ─ flatten ─┴ concat ─ dropout ─ FC+ReLU … FC+Tanh ─┐
//! beams [4] ──────────────────────────────────────────────────────────────────────────┴ concat ─ FC → 3
//! ```
//!
//! V2 (past + current beams):
//!
//! ```text
//! past [n×4] ─ conv1d(k, F) ─ ReLU ─ flatten ─ FC+ReLU … FC+Tanh ─┐
//! beams [4] ──────────────────────────────────────────────────────┴ concat ─ FC → 3
//! ```
//!
//! The current beams enter right before the output layer.

mod train;

pub use train::{train, EpochLog, TrainConfig, TrainError, TrainLog};

use serde::{Deserialize, Serialize};

use crate::dvl::BodyVelocity;
use crate::nn::{GraphBuilder, Model, NnError, NodeId, Tensor};
use crate::seed::Rng;
use crate::sim::{Dataset, SampleWindow};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("window/model mismatch: {0}")]
    InputMismatch(String),
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    V1,
    V2,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::V1 => "BeamsNetV1",
            Variant::V2 => "BeamsNetV2",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "v1" | "beamsnetv1" => Ok(Variant::V1),
            "v2" | "beamsnetv2" => Ok(Variant::V2),
            other => Err(format!("unknown variant {other:?} (expected v1 or v2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamsNetV1Config {
    pub conv_filters: usize,
    pub conv_kernel: usize,
    pub dropout_p: f64,
    /// Hidden layers between the IMU merge and the beam merge; the last one
    /// uses Tanh, the others ReLU.
    pub fc_sizes: Vec<usize>,
    /// Extra ReLU layers after the beam merge, before the output.
    pub post_merge_fc: Vec<usize>,
    pub imu_block_len: usize,
}

impl Default for BeamsNetV1Config {
    fn default() -> Self {
        Self {
            conv_filters: 6,
            conv_kernel: 2,
            dropout_p: 0.2,
            fc_sizes: vec![512, 64],
            post_merge_fc: vec![],
            imu_block_len: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamsNetV2Config {
    pub n_past: usize,
    pub conv_filters: usize,
    pub conv_kernel: usize,
    pub fc_sizes: Vec<usize>,
}

impl Default for BeamsNetV2Config {
    fn default() -> Self {
        Self {
            n_past: 3,
            conv_filters: 6,
            conv_kernel: 2,
            fc_sizes: vec![32, 16],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum NetConfig {
    V1(BeamsNetV1Config),
    V2(BeamsNetV2Config),
}

impl NetConfig {
    pub fn variant(&self) -> Variant {
        match self {
            NetConfig::V1(_) => Variant::V1,
            NetConfig::V2(_) => Variant::V2,
        }
    }
}

fn check_sizes(sizes: &[usize], what: &str) -> Result<(), ModelError> {
    if sizes.contains(&0) {
        return Err(ModelError::InvalidConfig(format!("{what} sizes must be positive")));
    }
    Ok(())
}

/// Dense stack with ReLU on every layer but the last, which gets Tanh.
fn hidden_stack(b: &mut GraphBuilder, mut x: NodeId, sizes: &[usize]) -> Result<NodeId, NnError> {
    for (i, &n) in sizes.iter().enumerate() {
        let name = format!("fc{}", i + 1);
        x = b.dense(&name, x, n)?;
        x = if i + 1 == sizes.len() {
            b.tanh(&format!("{name}_tanh"), x)?
        } else {
            b.relu(&format!("{name}_relu"), x)?
        };
    }
    Ok(x)
}

fn head(b: &mut GraphBuilder, name: &str, x: NodeId, filters: usize, kernel: usize) -> Result<NodeId, NnError> {
    let c = b.conv1d(&format!("{name}_conv"), x, filters, kernel)?;
    let c = b.relu(&format!("{name}_relu"), c)?;
    b.flatten(&format!("{name}_flat"), c)
}

fn output_block(b: &mut GraphBuilder, features: NodeId, beams: NodeId, post: &[usize]) -> Result<NodeId, NnError> {
    let mut x = b.concat("beam_merge", &[features, beams])?;
    for (i, &n) in post.iter().enumerate() {
        let name = format!("post{}", i + 1);
        x = b.dense(&name, x, n)?;
        x = b.relu(&format!("{name}_relu"), x)?;
    }
    b.dense("out", x, 3)
}

pub fn build_v1(cfg: &BeamsNetV1Config, rng: &mut Rng) -> Result<Model, ModelError> {
    if cfg.conv_kernel == 0 || cfg.conv_filters == 0 {
        return Err(ModelError::InvalidConfig("conv kernel and filters must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&cfg.dropout_p) {
        return Err(ModelError::InvalidConfig(format!("dropout p must be in [0, 1), got {}", cfg.dropout_p)));
    }
    if cfg.imu_block_len < cfg.conv_kernel {
        return Err(ModelError::InvalidConfig(format!(
            "imu block of {} rows is shorter than kernel {}",
            cfg.imu_block_len, cfg.conv_kernel
        )));
    }
    if cfg.fc_sizes.is_empty() {
        return Err(ModelError::InvalidConfig("fc_sizes must not be empty".into()));
    }
    check_sizes(&cfg.fc_sizes, "fc")?;
    check_sizes(&cfg.post_merge_fc, "post-merge fc")?;

    let mut b = GraphBuilder::new(rng);
    let accel = b.input("accel", &[cfg.imu_block_len, 3])?;
    let gyro = b.input("gyro", &[cfg.imu_block_len, 3])?;
    let beams = b.input("beams", &[4])?;
    let a = head(&mut b, "accel", accel, cfg.conv_filters, cfg.conv_kernel)?;
    let g = head(&mut b, "gyro", gyro, cfg.conv_filters, cfg.conv_kernel)?;
    let x = b.concat("imu_merge", &[a, g])?;
    let x = b.dropout("dropout", x, cfg.dropout_p)?;
    let x = hidden_stack(&mut b, x, &cfg.fc_sizes)?;
    let out = output_block(&mut b, x, beams, &cfg.post_merge_fc)?;
    Ok(b.build(out)?)
}

pub fn build_v2(cfg: &BeamsNetV2Config, rng: &mut Rng) -> Result<Model, ModelError> {
    if cfg.conv_kernel == 0 || cfg.conv_filters == 0 {
        return Err(ModelError::InvalidConfig("conv kernel and filters must be >= 1".into()));
    }
    if cfg.n_past < cfg.conv_kernel {
        return Err(ModelError::InvalidConfig(format!(
            "n_past {} must be >= conv kernel {}",
            cfg.n_past, cfg.conv_kernel
        )));
    }
    if cfg.fc_sizes.is_empty() {
        return Err(ModelError::InvalidConfig("fc_sizes must not be empty".into()));
    }
    check_sizes(&cfg.fc_sizes, "fc")?;

    let mut b = GraphBuilder::new(rng);
    let past = b.input("past_beams", &[cfg.n_past, 4])?;
    let beams = b.input("beams", &[4])?;
    let p = head(&mut b, "past", past, cfg.conv_filters, cfg.conv_kernel)?;
    let x = hidden_stack(&mut b, p, &cfg.fc_sizes)?;
    let out = output_block(&mut b, x, beams, &[])?;
    Ok(b.build(out)?)
}

/// Per-channel affine map `(x − mean) / std` for one sequence input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelScaling {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ChannelScaling {
    /// Population statistics over every row; channels with (near) zero
    /// spread keep unit std.
    pub fn fit<'a>(rows: impl Iterator<Item = &'a [f64]>, channels: usize) -> Self {
        let mut n = 0usize;
        let mut mean = vec![0.0; channels];
        let mut m2 = vec![0.0; channels];
        // Welford, one pass
        for r in rows {
            n += 1;
            for c in 0..channels {
                let d = r[c] - mean[c];
                mean[c] += d / n as f64;
                m2[c] += d * (r[c] - mean[c]);
            }
        }
        let std = m2
            .iter()
            .map(|&v| {
                let s = if n > 0 { (v / n as f64).sqrt() } else { 0.0 };
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    fn apply(&self, data: &mut [f64]) {
        let c = self.mean.len();
        for (i, x) in data.iter_mut().enumerate() {
            *x = (*x - self.mean[i % c]) / self.std[i % c];
        }
    }
}

/// A built network together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamsNet {
    config: NetConfig,
    model: Model,
    /// One entry per network input, in graph input order (V1: accel, gyro,
    /// current beams; V2: past beams, current beams).
    scaling: Option<Vec<ChannelScaling>>,
}

impl BeamsNet {
    pub fn new(config: NetConfig, rng: &mut Rng) -> Result<Self, ModelError> {
        let model = match &config {
            NetConfig::V1(c) => build_v1(c, rng)?,
            NetConfig::V2(c) => build_v2(c, rng)?,
        };
        Ok(Self {
            config,
            model,
            scaling: None,
        })
    }

    pub fn v1(cfg: BeamsNetV1Config, rng: &mut Rng) -> Result<Self, ModelError> {
        Self::new(NetConfig::V1(cfg), rng)
    }

    pub fn v2(cfg: BeamsNetV2Config, rng: &mut Rng) -> Result<Self, ModelError> {
        Self::new(NetConfig::V2(cfg), rng)
    }

    pub fn variant(&self) -> Variant {
        self.config.variant()
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn model_mut(&mut self) -> &mut Model {
        &mut self.model
    }

    pub fn input_scaling(&self) -> Option<&[ChannelScaling]> {
        self.scaling.as_deref()
    }

    pub fn set_input_scaling(&mut self, scaling: Option<Vec<ChannelScaling>>) -> Result<(), ModelError> {
        if let Some(s) = &scaling {
            let want: Vec<usize> = match &self.config {
                NetConfig::V1(_) => vec![3, 3, 4],
                NetConfig::V2(_) => vec![4, 4],
            };
            let got: Vec<usize> = s.iter().map(|c| c.mean.len()).collect();
            if got != want || s.iter().any(|c| c.std.len() != c.mean.len() || c.std.iter().any(|v| !(*v > 0.0))) {
                return Err(ModelError::InvalidConfig(format!(
                    "input scaling channels {got:?} do not match {want:?}"
                )));
            }
        }
        self.scaling = scaling;
        Ok(())
    }

    /// Fit per-channel standardization of every input on `windows`.
    pub fn fit_input_scaling(&self, windows: &[SampleWindow]) -> Vec<ChannelScaling> {
        let current = ChannelScaling::fit(windows.iter().map(|w| w.current_beams.0.as_slice()), 4);
        match &self.config {
            NetConfig::V1(_) => {
                let accel = windows.iter().flat_map(|w| w.accel_block.iter().map(|r| r.as_slice()));
                let gyro = windows.iter().flat_map(|w| w.gyro_block.iter().map(|r| r.as_slice()));
                vec![ChannelScaling::fit(accel, 3), ChannelScaling::fit(gyro, 3), current]
            }
            NetConfig::V2(c) => {
                let past = windows
                    .iter()
                    .flat_map(|w| w.past_beams[w.past_beams.len().saturating_sub(c.n_past)..].iter().map(|b| b.0.as_slice()));
                vec![ChannelScaling::fit(past, 4), current]
            }
        }
    }

    /// Past beams the variant consumes.
    pub fn required_past(&self) -> usize {
        match &self.config {
            NetConfig::V1(_) => 0,
            NetConfig::V2(c) => c.n_past,
        }
    }

    /// Check that every window of `ds` can feed this network.
    pub fn check_dataset(&self, ds: &Dataset) -> Result<(), ModelError> {
        match &self.config {
            NetConfig::V1(c) if ds.block_len != c.imu_block_len => Err(ModelError::InputMismatch(format!(
                "dataset imu blocks have {} rows, model expects {}",
                ds.block_len, c.imu_block_len
            ))),
            NetConfig::V2(c) if ds.n_past < c.n_past => Err(ModelError::InputMismatch(format!(
                "dataset carries {} past beams, model needs {}",
                ds.n_past, c.n_past
            ))),
            _ => Ok(()),
        }
    }

    /// Network input tensors for one window, in graph input order.
    pub fn inputs(&self, w: &SampleWindow) -> Result<Vec<Tensor>, ModelError> {
        let mut current = w.current_beams.0.to_vec();
        if let Some(s) = &self.scaling {
            s[s.len() - 1].apply(&mut current);
        }
        let beams = Tensor::from_vec(current);
        match &self.config {
            NetConfig::V1(c) => {
                if w.accel_block.len() != c.imu_block_len || w.gyro_block.len() != c.imu_block_len {
                    return Err(ModelError::InputMismatch(format!(
                        "imu block has {}/{} rows, model expects {}",
                        w.accel_block.len(),
                        w.gyro_block.len(),
                        c.imu_block_len
                    )));
                }
                let mut accel = w.accel_block.concat();
                let mut gyro = w.gyro_block.concat();
                if let Some(s) = &self.scaling {
                    s[0].apply(&mut accel);
                    s[1].apply(&mut gyro);
                }
                let accel = Tensor::new(vec![c.imu_block_len, 3], accel)?;
                let gyro = Tensor::new(vec![c.imu_block_len, 3], gyro)?;
                Ok(vec![accel, gyro, beams])
            }
            NetConfig::V2(c) => {
                if w.past_beams.len() < c.n_past {
                    return Err(ModelError::InputMismatch(format!(
                        "window has {} past beams, model needs {}",
                        w.past_beams.len(),
                        c.n_past
                    )));
                }
                let recent = &w.past_beams[w.past_beams.len() - c.n_past..];
                let mut data: Vec<f64> = recent.iter().flat_map(|b| b.0).collect();
                if let Some(s) = &self.scaling {
                    s[0].apply(&mut data);
                }
                Ok(vec![Tensor::new(vec![c.n_past, 4], data)?, beams])
            }
        }
    }

    pub fn predict(&self, w: &SampleWindow) -> Result<BodyVelocity, ModelError> {
        let x = self.inputs(w)?;
        let refs: Vec<&Tensor> = x.iter().collect();
        let y = self.model.predict(&refs)?;
        let d = y.data();
        Ok(BodyVelocity([d[0], d[1], d[2]]))
    }

    /// Eval-mode predictions for many windows (parallel when enabled).
    pub fn predict_batch(&self, windows: &[SampleWindow]) -> Result<Vec<BodyVelocity>, ModelError> {
        crate::par::map_slice(windows, |w| self.predict(w)).into_iter().collect()
    }

    /// Zero both IMU conv heads of a V1 network so its output depends on the
    /// current beams only.
    pub fn ablate_imu_heads(&mut self) -> Result<(), ModelError> {
        if self.variant() != Variant::V1 {
            return Err(ModelError::InvalidConfig("only V1 has IMU heads".into()));
        }
        for name in ["accel_conv.weight", "accel_conv.bias", "gyro_conv.weight", "gyro_conv.bias"] {
            let shape = self.model.param(name).expect("V1 parameter").shape().to_vec();
            self.model.set_param(name, Tensor::zeros(&shape))?;
        }
        Ok(())
    }
}
