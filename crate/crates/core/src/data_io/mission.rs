//! On-disk mission format.
//!
//! A mission is a directory with three files:
//!
//! | file           | content                                                      |
//! |----------------|--------------------------------------------------------------|
//! | `mission.json` | metadata sidecar: id, kind, nominal rates, notes             |
//! | `imu.csv`      | `t,fx,fy,fz,gx,gy,gz`: s, m/s² (specific force), rad/s       |
//! | `dvl.csv`      | `t,b1,b2,b3,b4,vx,vy,vz`: s, m/s beams, m/s body velocity    |
//!
//! The beam columns of `dvl.csv` are optional (recorded missions only carry
//! the DVL velocity); when present all four must be. Numbers are written in
//! shortest round-trip decimal form, so values survive a save/load cycle
//! bit-exactly. Timestamps must be strictly increasing in both tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::dvl::{BeamVector, BodyVelocity};

pub const MISSION_FORMAT: &str = "beamsnet-mission";
pub const MISSION_VERSION: u32 = 1;

pub const IMU_COLUMNS: [&str; 7] = ["t", "fx", "fy", "fz", "gx", "gy", "gz"];
pub const DVL_BEAM_COLUMNS: [&str; 4] = ["b1", "b2", "b3", "b4"];
pub const DVL_VELOCITY_COLUMNS: [&str; 3] = ["vx", "vy", "vz"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissionKind {
    /// Beams are synthetic measurements, velocity is the clean truth.
    Simulated,
    /// Velocity is what the vehicle's DVL reported; beams are absent or
    /// were synthesized from it.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionMeta {
    pub format: String,
    pub version: u32,
    pub mission_id: String,
    pub kind: MissionKind,
    pub imu_rate: f64,
    pub dvl_rate: f64,
    #[serde(default)]
    pub notes: String,
    /// Free-form generation parameters (seeds, error models, ...).
    #[serde(default)]
    pub extra: serde_json::Value,
}

impl MissionMeta {
    pub fn new(mission_id: &str, kind: MissionKind, imu_rate: f64, dvl_rate: f64) -> Self {
        Self {
            format: MISSION_FORMAT.to_string(),
            version: MISSION_VERSION,
            mission_id: mission_id.to_string(),
            kind,
            imu_rate,
            dvl_rate,
            notes: String::new(),
            extra: serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImuTable {
    pub t: Vec<f64>,
    pub accel: Vec<[f64; 3]>,
    pub gyro: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DvlTable {
    pub t: Vec<f64>,
    pub beams: Option<Vec<BeamVector>>,
    pub velocity: Vec<BodyVelocity>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionFile {
    pub meta: MissionMeta,
    pub imu: ImuTable,
    pub dvl: DvlTable,
    /// Non-fatal findings from validation (rate deviations, IMU gaps).
    pub warnings: Vec<String>,
}

impl MissionFile {
    /// IMU rows per DVL epoch at the nominal rates.
    pub fn block_len(&self) -> usize {
        (self.meta.imu_rate / self.meta.dvl_rate).round() as usize
    }

    /// Check table invariants; returns warnings for soft problems.
    pub fn validate(&mut self) -> Result<(), DataError> {
        let m = &self.meta;
        if !(m.imu_rate > 0.0 && m.dvl_rate > 0.0) {
            return Err(DataError::Metadata(format!(
                "rates must be positive (imu {}, dvl {})",
                m.imu_rate, m.dvl_rate
            )));
        }
        let ratio = m.imu_rate / m.dvl_rate;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return Err(DataError::Metadata(format!(
                "imu rate {} is not an integer multiple of dvl rate {}",
                m.imu_rate, m.dvl_rate
            )));
        }
        if self.imu.accel.len() != self.imu.t.len() || self.imu.gyro.len() != self.imu.t.len() {
            return Err(DataError::Metadata("imu columns have different lengths".into()));
        }
        if self.dvl.velocity.len() != self.dvl.t.len()
            || self.dvl.beams.as_ref().is_some_and(|b| b.len() != self.dvl.t.len())
        {
            return Err(DataError::Metadata("dvl columns have different lengths".into()));
        }
        check_monotone("imu.csv", &self.imu.t)?;
        check_monotone("dvl.csv", &self.dvl.t)?;

        let mut warnings = Vec::new();
        for (name, t, rate) in [("imu", &self.imu.t, m.imu_rate), ("dvl", &self.dvl.t, m.dvl_rate)] {
            if t.len() >= 2 {
                let observed = (t.len() - 1) as f64 / (t[t.len() - 1] - t[0]);
                let dev = (observed - rate).abs() / rate;
                if dev > 0.01 {
                    warnings.push(format!(
                        "{name} rate {observed:.4} Hz deviates {:.2}% from nominal {rate} Hz",
                        dev * 100.0
                    ));
                }
            }
        }
        let block = self.block_len();
        let half = 0.5 / m.imu_rate;
        let mut gaps = 0;
        for k in 1..self.dvl.t.len() {
            let lo = self.dvl.t[k] - 1.0 / m.dvl_rate + half;
            let hi = self.dvl.t[k] + half;
            let a = self.imu.t.partition_point(|&x| x < lo);
            let b = self.imu.t.partition_point(|&x| x <= hi);
            if b - a < block {
                gaps += 1;
            }
        }
        if gaps > 0 {
            warnings.push(format!("{gaps} dvl epochs lack a full block of {block} imu rows"));
        }
        for w in &warnings {
            log::warn!("mission {}: {w}", self.meta.mission_id);
        }
        self.warnings = warnings;
        Ok(())
    }
}

fn check_monotone(file: &str, t: &[f64]) -> Result<(), DataError> {
    for (i, w) in t.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(DataError::NonMonotonicTime {
                file: file.to_string(),
                row: i + 2,
            });
        }
    }
    if let Some(i) = t.iter().position(|x| !x.is_finite()) {
        return Err(DataError::Parse {
            file: file.to_string(),
            row: i + 1,
            msg: "non-finite timestamp".into(),
        });
    }
    Ok(())
}

fn io_err(path: &Path, e: std::io::Error) -> DataError {
    DataError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

/// Accepts the mission directory or its `mission.json`.
fn mission_dir(path: &Path) -> PathBuf {
    if path.is_file() {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    } else {
        path.to_path_buf()
    }
}

struct Table {
    file: String,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn column(&self, name: &str) -> Result<usize, DataError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn {
                file: self.file.clone(),
                column: name.to_string(),
            })
    }

    fn has(&self, name: &str) -> bool {
        self.header.iter().any(|h| h == name)
    }

    fn get(&self, cols: &[usize]) -> impl Iterator<Item = Vec<f64>> + '_ {
        let cols = cols.to_vec();
        self.rows.iter().map(move |r| cols.iter().map(|&c| r[c]).collect())
    }
}

fn read_table(path: &Path) -> Result<Table, DataError> {
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| DataError::Parse {
            file: file.clone(),
            row: 1,
            msg: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| DataError::Parse {
            file: file.clone(),
            row,
            msg: e.to_string(),
        })?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DataError::Parse {
                file: file.clone(),
                row,
                msg: e.to_string(),
            })?;
        rows.push(vals);
    }
    Ok(Table { file, header, rows })
}

/// Read and check only the metadata sidecar of a mission.
pub fn load_mission_meta(path: &Path) -> Result<MissionMeta, DataError> {
    let meta_path = mission_dir(path).join("mission.json");
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| io_err(&meta_path, e))?;
    let meta: MissionMeta =
        serde_json::from_str(&meta_text).map_err(|e| DataError::Metadata(format!("{}: {e}", meta_path.display())))?;
    if meta.format != MISSION_FORMAT {
        return Err(DataError::Metadata(format!("unexpected format tag {:?}", meta.format)));
    }
    if meta.version != MISSION_VERSION {
        return Err(DataError::UnknownVersion(meta.version));
    }
    Ok(meta)
}

pub fn load_mission(path: &Path) -> Result<MissionFile, DataError> {
    let dir = mission_dir(path);
    let meta = load_mission_meta(path)?;

    let imu = read_table(&dir.join("imu.csv"))?;
    let cols = IMU_COLUMNS
        .iter()
        .map(|c| imu.column(c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut imu_table = ImuTable::default();
    for r in imu.get(&cols) {
        imu_table.t.push(r[0]);
        imu_table.accel.push([r[1], r[2], r[3]]);
        imu_table.gyro.push([r[4], r[5], r[6]]);
    }

    let dvl = read_table(&dir.join("dvl.csv"))?;
    let t_col = dvl.column("t")?;
    let v_cols = DVL_VELOCITY_COLUMNS
        .iter()
        .map(|c| dvl.column(c))
        .collect::<Result<Vec<_>, _>>()?;
    let beam_cols = if DVL_BEAM_COLUMNS.iter().any(|c| dvl.has(c)) {
        Some(
            DVL_BEAM_COLUMNS
                .iter()
                .map(|c| dvl.column(c))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let mut dvl_table = DvlTable {
        t: dvl.rows.iter().map(|r| r[t_col]).collect(),
        beams: None,
        velocity: dvl.get(&v_cols).map(|r| BodyVelocity([r[0], r[1], r[2]])).collect(),
    };
    if let Some(bc) = beam_cols {
        dvl_table.beams = Some(dvl.get(&bc).map(|r| BeamVector([r[0], r[1], r[2], r[3]])).collect());
    }

    let mut mission = MissionFile {
        meta,
        imu: imu_table,
        dvl: dvl_table,
        warnings: Vec::new(),
    };
    mission.validate()?;
    Ok(mission)
}

/// Load several missions (in parallel when enabled), preserving order.
pub fn load_missions(paths: &[PathBuf]) -> Result<Vec<MissionFile>, DataError> {
    crate::par::map_slice(paths, |p| load_mission(p)).into_iter().collect()
}

/// Mission directories under `root`: `root` itself if it holds a
/// `mission.json`, otherwise every immediate subdirectory that does, sorted
/// by name.
pub fn discover_missions(root: &Path) -> Result<Vec<PathBuf>, DataError> {
    if root.join("mission.json").is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    if root.is_file() && root.file_name().is_some_and(|f| f == "mission.json") {
        return Ok(vec![mission_dir(root)]);
    }
    let entries = fs::read_dir(root).map_err(|e| io_err(root, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join("mission.json").is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(DataError::Metadata(format!("no missions found under {}", root.display())));
    }
    Ok(dirs)
}

fn fmt_row(out: &mut String, vals: &[f64]) {
    use std::fmt::Write;
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").expect("write to string");
    }
    out.push('\n');
}

pub fn save_mission(mission: &MissionFile, dir: &Path) -> Result<(), DataError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let meta = serde_json::to_string_pretty(&mission.meta).expect("metadata serializes");
    let meta_path = dir.join("mission.json");
    fs::write(&meta_path, meta + "\n").map_err(|e| io_err(&meta_path, e))?;

    let mut s = IMU_COLUMNS.join(",");
    s.push('\n');
    for i in 0..mission.imu.t.len() {
        let (a, g) = (mission.imu.accel[i], mission.imu.gyro[i]);
        fmt_row(&mut s, &[mission.imu.t[i], a[0], a[1], a[2], g[0], g[1], g[2]]);
    }
    let imu_path = dir.join("imu.csv");
    fs::write(&imu_path, s).map_err(|e| io_err(&imu_path, e))?;

    let mut s = String::from("t");
    if mission.dvl.beams.is_some() {
        s.push_str(",b1,b2,b3,b4");
    }
    s.push_str(",vx,vy,vz\n");
    let mut row = Vec::with_capacity(8);
    for k in 0..mission.dvl.t.len() {
        row.clear();
        row.push(mission.dvl.t[k]);
        if let Some(b) = &mission.dvl.beams {
            row.extend_from_slice(&b[k].0);
        }
        row.extend_from_slice(&mission.dvl.velocity[k].0);
        fmt_row(&mut s, &row);
    }
    let dvl_path = dir.join("dvl.csv");
    fs::write(&dvl_path, s).map_err(|e| io_err(&dvl_path, e))?;
    Ok(())
}
