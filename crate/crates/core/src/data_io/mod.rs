//! Mission ingestion, ground-truth re-corruption and checkpoint files.

pub mod checkpoint;
pub mod mission;
pub mod recorrupt;

use std::path::PathBuf;

pub use checkpoint::{load_checkpoint, load_checkpoint_as, save_checkpoint, CheckpointMeta};
pub use mission::{discover_missions, load_mission, load_mission_meta, load_missions, save_mission, MissionFile, MissionKind, MissionMeta};
pub use recorrupt::{recorrupt_mission, recorrupt_recorded, RecorruptOptions};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: missing column {column:?}")]
    MissingColumn { file: String, column: String },
    #[error("{file}: timestamps not strictly increasing at row {row}")]
    NonMonotonicTime { file: String, row: usize },
    #[error("{file}, row {row}: {msg}")]
    Parse { file: String, row: usize, msg: String },
    #[error("metadata: {0}")]
    Metadata(String),
    #[error("unsupported format version {0}")]
    UnknownVersion(u32),
    #[error("mission {0} has no recorded velocities")]
    MissingVelocity(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptContainer(String),
    #[error("checkpoint holds a {found} model, expected {expected}")]
    VariantMismatch { expected: String, found: String },
    #[error(transparent)]
    Dataset(#[from] crate::sim::DatasetError),
    #[error(transparent)]
    Beam(#[from] crate::dvl::DvlError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}
