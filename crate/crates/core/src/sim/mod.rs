//! Synthetic straight-line missions with synchronized IMU and DVL streams.
//!
//! Frames: body x forward, z down. Specific force is what an accelerometer
//! reads, so level unaccelerated flight gives `[0, 0, −g]`.

mod dataset;
pub mod fixture;

pub use dataset::{build_dataset, build_dataset_from_missions, split_point, Dataset, DatasetError, SampleWindow, TRAIN_FRACTION};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data_io::mission::{DvlTable, ImuTable, MissionFile, MissionKind, MissionMeta};
use crate::dvl::{self, BeamErrorParams, BeamGeometry, BeamVector, BodyVelocity};
use crate::seed::{rng_from_seed, Rng};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("invalid trajectory: {0}")]
    InvalidSpec(String),
    #[error("invalid sensor parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    /// m/s
    pub speed: f64,
    /// s
    pub duration: f64,
    /// Direction of travel relative to body x, radians.
    pub heading: f64,
    pub imu_rate: f64,
    pub dvl_rate: f64,
    /// m/s²
    pub gravity: f64,
}

impl TrajectorySpec {
    pub fn new(speed: f64, duration: f64) -> Self {
        Self {
            speed,
            duration,
            heading: 0.0,
            imu_rate: 100.0,
            dvl_rate: 1.0,
            gravity: 9.81,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidSpec(m));
        if !(self.speed >= 0.0) || !self.speed.is_finite() {
            return bad(format!("speed must be >= 0, got {}", self.speed));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return bad(format!("duration must be > 0, got {}", self.duration));
        }
        if !(self.imu_rate > 0.0 && self.dvl_rate > 0.0) {
            return bad("rates must be positive".into());
        }
        let ratio = self.imu_rate / self.dvl_rate;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return bad(format!(
                "imu rate {} must be an integer multiple of dvl rate {}",
                self.imu_rate, self.dvl_rate
            ));
        }
        if self.dvl_epochs() == 0 {
            return bad("duration shorter than one dvl period".into());
        }
        Ok(())
    }

    pub fn dvl_epochs(&self) -> usize {
        (self.duration * self.dvl_rate).round() as usize
    }

    pub fn imu_samples(&self) -> usize {
        (self.duration * self.imu_rate).round() as usize
    }

    pub fn block_len(&self) -> usize {
        (self.imu_rate / self.dvl_rate).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImuErrorParams {
    /// m/s²
    pub accel_bias: [f64; 3],
    /// rad/s
    pub gyro_bias: [f64; 3],
    /// m/s²
    pub accel_noise_std: f64,
    /// rad/s
    pub gyro_noise_std: f64,
    pub seed: u64,
}

impl ImuErrorParams {
    /// Zero biases, 0.01 m/s² and 0.001 rad/s white noise.
    pub fn default_with_seed(seed: u64) -> Self {
        Self {
            accel_bias: [0.0; 3],
            gyro_bias: [0.0; 3],
            accel_noise_std: 0.01,
            gyro_noise_std: 0.001,
            seed,
        }
    }

    pub fn zero(seed: u64) -> Self {
        Self {
            accel_noise_std: 0.0,
            gyro_noise_std: 0.0,
            ..Self::default_with_seed(seed)
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.accel_noise_std >= 0.0 && self.gyro_noise_std >= 0.0) {
            return Err(SimError::InvalidParams("imu noise std must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImuStream {
    pub accel: Vec<[f64; 3]>,
    pub gyro: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DvlStream {
    pub measured: Vec<BeamVector>,
    pub clean: Vec<BeamVector>,
}

/// Constant body-frame velocity, one sample per DVL epoch.
pub fn generate_trajectory(spec: &TrajectorySpec) -> Result<Vec<BodyVelocity>, SimError> {
    spec.validate()?;
    let v = BodyVelocity([
        spec.speed * spec.heading.cos(),
        spec.speed * spec.heading.sin(),
        0.0,
    ]);
    Ok(vec![v; spec.dvl_epochs()])
}

/// Add bias and white noise to clean IMU readings. Draw order per sample:
/// accel x, y, z then gyro x, y, z.
pub fn corrupt_imu(clean_accel: [f64; 3], clean_gyro: [f64; 3], p: &ImuErrorParams, rng: &mut Rng) -> ([f64; 3], [f64; 3]) {
    let mut a = [0.0; 3];
    let mut g = [0.0; 3];
    for i in 0..3 {
        let n: f64 = StandardNormal.sample(rng);
        a[i] = clean_accel[i] + p.accel_bias[i] + p.accel_noise_std * n;
    }
    for i in 0..3 {
        let n: f64 = StandardNormal.sample(rng);
        g[i] = clean_gyro[i] + p.gyro_bias[i] + p.gyro_noise_std * n;
    }
    (a, g)
}

/// IMU for unaccelerated level flight: specific force `[0, 0, −g]`, zero
/// angular rate, plus the error model.
pub fn synthesize_imu(spec: &TrajectorySpec, p: &ImuErrorParams, rng: &mut Rng) -> Result<ImuStream, SimError> {
    spec.validate()?;
    p.validate()?;
    let n = spec.imu_samples();
    let clean_a = [0.0, 0.0, -spec.gravity];
    let mut out = ImuStream {
        accel: Vec::with_capacity(n),
        gyro: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let (a, g) = corrupt_imu(clean_a, [0.0; 3], p, rng);
        out.accel.push(a);
        out.gyro.push(g);
    }
    Ok(out)
}

/// Per-epoch beam error model over a velocity series.
pub fn synthesize_dvl(
    geom: &BeamGeometry,
    velocities: &[BodyVelocity],
    p: &BeamErrorParams,
    rng: &mut Rng,
) -> Result<DvlStream, SimError> {
    p.validate().map_err(|e| SimError::InvalidParams(e.to_string()))?;
    let mut out = DvlStream {
        measured: Vec::with_capacity(velocities.len()),
        clean: Vec::with_capacity(velocities.len()),
    };
    for &v in velocities {
        let clean = dvl::beams_from_velocity(geom, v).map_err(|e| SimError::InvalidParams(e.to_string()))?;
        out.measured.push(dvl::corrupt_clean_beams(clean, p, rng));
        out.clean.push(clean);
    }
    Ok(out)
}

/// Simulate a complete straight-line mission. IMU noise is drawn from
/// `imu.seed`, beam noise from `beams.seed`.
pub fn simulate_mission(
    mission_id: &str,
    spec: &TrajectorySpec,
    geom: &BeamGeometry,
    imu: &ImuErrorParams,
    beams: &BeamErrorParams,
) -> Result<MissionFile, SimError> {
    let velocities = generate_trajectory(spec)?;
    let imu_stream = synthesize_imu(spec, imu, &mut rng_from_seed(imu.seed))?;
    let dvl_stream = synthesize_dvl(geom, &velocities, beams, &mut rng_from_seed(beams.seed))?;

    let mut meta = MissionMeta::new(mission_id, MissionKind::Simulated, spec.imu_rate, spec.dvl_rate);
    meta.notes = "straight-line constant-speed simulation".into();
    meta.extra = serde_json::json!({
        "trajectory": spec,
        "imu_errors": imu,
        "beam_errors": beams,
        "pitch_rad": geom.pitch(),
    });
    Ok(MissionFile {
        meta,
        imu: ImuTable {
            t: (0..imu_stream.accel.len()).map(|j| j as f64 / spec.imu_rate).collect(),
            accel: imu_stream.accel,
            gyro: imu_stream.gyro,
        },
        dvl: DvlTable {
            t: (0..velocities.len()).map(|k| k as f64 / spec.dvl_rate).collect(),
            beams: Some(dvl_stream.measured),
            velocity: velocities,
        },
        warnings: Vec::new(),
    })
}
