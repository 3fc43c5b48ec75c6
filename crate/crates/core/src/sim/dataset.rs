use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data_io::mission::MissionFile;
use crate::dvl::{BeamVector, BodyVelocity};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DatasetError {
    #[error("mission {0} has no beam measurements; re-corrupt it first")]
    MissingBeams(String),
    #[error("streams misaligned: {0}")]
    Misaligned(String),
    #[error("mission {mission} too short: no epoch has {n_past} predecessors and a full imu block")]
    TooShort { mission: String, n_past: usize },
    #[error("invalid split fraction {0}")]
    InvalidSplit(f64),
}

/// Network inputs and target for one DVL epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleWindow {
    /// `block_len` rows of specific force ending at this epoch, m/s².
    pub accel_block: Vec<[f64; 3]>,
    /// `block_len` rows of angular rate ending at this epoch, rad/s.
    pub gyro_block: Vec<[f64; 3]>,
    pub current_beams: BeamVector,
    /// Previous measured beams, oldest first.
    pub past_beams: Vec<BeamVector>,
    pub gt_velocity: BodyVelocity,
    /// Epoch time, s.
    pub t: f64,
    /// Index of the source mission in concatenation order.
    pub mission: usize,
}

/// Time-ordered windows with a chronological train/test split.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub windows: Vec<SampleWindow>,
    pub split_index: usize,
    pub n_past: usize,
    pub block_len: usize,
}

pub const TRAIN_FRACTION: f64 = 0.75;

pub fn split_point(len: usize, fraction: f64) -> usize {
    (fraction * len as f64).floor() as usize
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn train(&self) -> &[SampleWindow] {
        &self.windows[..self.split_index]
    }

    pub fn test(&self) -> &[SampleWindow] {
        &self.windows[self.split_index..]
    }

    pub fn with_split(mut self, fraction: f64) -> Result<Self, DatasetError> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(DatasetError::InvalidSplit(fraction));
        }
        self.split_index = split_point(self.windows.len(), fraction);
        Ok(self)
    }

    /// Content hash (hex SHA-256) over a little-endian canonical encoding;
    /// identical on every platform for the same logical content.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"beamsnet/dataset/v1");
        for v in [self.n_past, self.block_len, self.split_index, self.windows.len()] {
            h.update((v as u64).to_le_bytes());
        }
        let mut put = |x: f64| h.update(x.to_bits().to_le_bytes());
        for w in &self.windows {
            put(w.mission as f64);
            put(w.t);
            for r in w.accel_block.iter().chain(&w.gyro_block) {
                r.iter().for_each(|&x| put(x));
            }
            w.current_beams.0.iter().for_each(|&x| put(x));
            for b in &w.past_beams {
                b.0.iter().for_each(|&x| put(x));
            }
            w.gt_velocity.0.iter().for_each(|&x| put(x));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Windows for one mission: one per DVL epoch that has at least `n_past`
/// predecessors and a complete block of IMU rows in `(t_k − 1/f_dvl, t_k]`.
/// Epochs without a complete block (warm-up, logging gaps) are skipped.
fn mission_windows(m: &MissionFile, n_past: usize, mission_index: usize) -> Result<Vec<SampleWindow>, DatasetError> {
    let beams = m
        .dvl
        .beams
        .as_ref()
        .ok_or_else(|| DatasetError::MissingBeams(m.meta.mission_id.clone()))?;
    if beams.len() != m.dvl.t.len() || m.dvl.velocity.len() != m.dvl.t.len() {
        return Err(DatasetError::Misaligned(format!(
            "{}: dvl columns differ in length",
            m.meta.mission_id
        )));
    }
    if m.imu.accel.len() != m.imu.t.len() || m.imu.gyro.len() != m.imu.t.len() {
        return Err(DatasetError::Misaligned(format!(
            "{}: imu columns differ in length",
            m.meta.mission_id
        )));
    }
    let block = m.block_len();
    let half = 0.5 / m.meta.imu_rate;
    let period = 1.0 / m.meta.dvl_rate;
    let mut out = Vec::new();
    for k in n_past.max(1)..m.dvl.t.len() {
        let t = m.dvl.t[k];
        let end = m.imu.t.partition_point(|&x| x <= t + half);
        if end < block {
            continue;
        }
        let start = end - block;
        if m.imu.t[start] <= t - period + half - 1e-9 * period {
            // rows older than one DVL period: a gap inside the block
            continue;
        }
        out.push(SampleWindow {
            accel_block: m.imu.accel[start..end].to_vec(),
            gyro_block: m.imu.gyro[start..end].to_vec(),
            current_beams: beams[k],
            past_beams: beams[k - n_past..k].to_vec(),
            gt_velocity: m.dvl.velocity[k],
            t,
            mission: mission_index,
        });
    }
    if out.is_empty() {
        return Err(DatasetError::TooShort {
            mission: m.meta.mission_id.clone(),
            n_past,
        });
    }
    Ok(out)
}

/// Windows from a single mission with the default 75/25 chronological split.
pub fn build_dataset(m: &MissionFile, n_past: usize) -> Result<Dataset, DatasetError> {
    build_dataset_from_missions(std::slice::from_ref(m), n_past)
}

/// Concatenate missions in order. Windows never span a mission boundary;
/// the split is taken over the concatenation.
pub fn build_dataset_from_missions(missions: &[MissionFile], n_past: usize) -> Result<Dataset, DatasetError> {
    let first = missions
        .first()
        .ok_or_else(|| DatasetError::Misaligned("no missions given".into()))?;
    let block_len = first.block_len();
    if let Some(m) = missions.iter().find(|m| m.block_len() != block_len) {
        return Err(DatasetError::Misaligned(format!(
            "{}: imu block length {} differs from {}",
            m.meta.mission_id,
            m.block_len(),
            block_len
        )));
    }
    let parts = crate::par::map_indexed(missions.len(), |i| mission_windows(&missions[i], n_past, i));
    let mut windows = Vec::new();
    for p in parts {
        windows.extend(p?);
    }
    let split_index = split_point(windows.len(), TRAIN_FRACTION);
    Ok(Dataset {
        windows,
        split_index,
        n_past,
        block_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvl::{BeamErrorParams, BeamGeometry};
    use crate::sim::{simulate_mission, ImuErrorParams, TrajectorySpec};

    fn mission(duration: f64) -> MissionFile {
        simulate_mission(
            "t",
            &TrajectorySpec::new(1.0, duration),
            &BeamGeometry::default(),
            &ImuErrorParams::default_with_seed(1),
            &BeamErrorParams::reference(2),
        )
        .unwrap()
    }

    #[test]
    fn window_counts_and_split() {
        let m = mission(7200.0);
        let d0 = build_dataset(&m, 0).unwrap();
        assert_eq!(d0.len(), 7199);
        let d3 = build_dataset(&m, 3).unwrap();
        assert_eq!(d3.len(), 7197);
        assert_eq!(d3.windows[0].t, 3.0);
        assert_eq!(d3.train().len(), split_point(7197, TRAIN_FRACTION));
        assert_eq!(d3.train().len() + d3.test().len(), 7197);
        assert_eq!(split_point(7196, TRAIN_FRACTION), 5397);
        assert_eq!(7196 - split_point(7196, TRAIN_FRACTION), 1799);
    }

    #[test]
    fn blocks_are_disjoint_and_end_at_epoch() {
        let m = mission(30.0);
        let d = build_dataset(&m, 2).unwrap();
        for w in &d.windows {
            assert_eq!(w.accel_block.len(), 100);
            assert_eq!(w.past_beams.len(), 2);
            let k = w.t as usize;
            assert_eq!(w.current_beams, m.dvl.beams.as_ref().unwrap()[k]);
            assert_eq!(w.past_beams[1], m.dvl.beams.as_ref().unwrap()[k - 1]);
            assert_eq!(w.gt_velocity, m.dvl.velocity[k]);
            // last row of the block is the IMU sample at the epoch time
            assert_eq!(w.accel_block[99], m.imu.accel[k * 100]);
            assert_eq!(w.accel_block[0], m.imu.accel[(k - 1) * 100 + 1]);
        }
    }

    #[test]
    fn missing_beams_and_short_missions() {
        let mut m = mission(10.0);
        assert!(matches!(build_dataset(&m, 20), Err(DatasetError::TooShort { .. })));
        m.dvl.beams = None;
        assert!(matches!(build_dataset(&m, 0), Err(DatasetError::MissingBeams(_))));
    }

    #[test]
    fn fingerprint_is_stable() {
        let a = build_dataset(&mission(20.0), 3).unwrap();
        let b = build_dataset(&mission(20.0), 3).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = build_dataset(&mission(20.0), 2).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }
}
