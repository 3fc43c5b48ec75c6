//! Checkpoint container.
//!
//! ```text
//! offset  size  content
//! 0       8     magic "BMNTCKPT"
//! 8       4     format version, u32 LE (= 1)
//! 12      8     header length H, u64 LE
//! 20      H     UTF-8 JSON header
//! 20+H    8·N   tensor data, f64 LE, in header order
//! end−32  32    SHA-256 of every preceding byte
//! ```
//!
//! The header is `{"variant", "config", "input_scaling", "meta",
//! "tensors": [{"name", "shape"}]}`; `input_scaling` is null for networks
//! that take raw inputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DataError;
use crate::metrics::EvalReport;
use crate::model::{BeamsNet, ChannelScaling, NetConfig, TrainConfig, Variant};
use crate::nn::Tensor;
use crate::seed::rng_from_seed;

pub const MAGIC: &[u8; 8] = b"BMNTCKPT";
pub const VERSION: u32 = 1;
const PREFIX: usize = 20;
const DIGEST: usize = 32;

/// Provenance stored next to the weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub dataset_fingerprint: Option<String>,
    pub train: Option<TrainConfig>,
    pub metrics: Vec<EvalReport>,
    #[serde(default)]
    pub notes: String,
    /// Free-form provenance (e.g. how the dataset was built).
    #[serde(default)]
    pub extra: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    variant: Variant,
    config: NetConfig,
    #[serde(default)]
    input_scaling: Option<Vec<ChannelScaling>>,
    meta: CheckpointMeta,
    tensors: Vec<TensorEntry>,
}

pub fn encode_checkpoint(net: &BeamsNet, meta: &CheckpointMeta) -> Result<Vec<u8>, DataError> {
    let params = net.model().params();
    let header = Header {
        variant: net.variant(),
        config: net.config().clone(),
        input_scaling: net.input_scaling().map(<[ChannelScaling]>::to_vec),
        meta: meta.clone(),
        tensors: params
            .iter()
            .map(|p| TensorEntry {
                name: p.name.clone(),
                shape: p.value.shape().to_vec(),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| DataError::Metadata(e.to_string()))?;
    let n: usize = params.iter().map(|p| p.value.len()).sum();
    let mut buf = Vec::with_capacity(PREFIX + json.len() + 8 * n + DIGEST);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(json.len() as u64).to_le_bytes());
    buf.extend_from_slice(&json);
    for p in params {
        for x in p.value.data() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    Ok(buf)
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<(BeamsNet, CheckpointMeta), DataError> {
    let corrupt = |m: &str| DataError::CorruptContainer(m.to_string());
    if bytes.len() < PREFIX + DIGEST {
        return Err(corrupt("file too short"));
    }
    if &bytes[..8] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(DataError::UnknownVersion(version));
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("checksum mismatch (truncated or modified)"));
    }
    let hlen = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    let hend = usize::try_from(hlen)
        .ok()
        .and_then(|h| PREFIX.checked_add(h))
        .filter(|&e| e <= body.len())
        .ok_or_else(|| corrupt("header length out of range"))?;
    let header: Header =
        serde_json::from_slice(&body[PREFIX..hend]).map_err(|e| DataError::CorruptContainer(format!("header: {e}")))?;
    if header.variant != header.config.variant() {
        return Err(corrupt("variant tag disagrees with config"));
    }

    // weights are overwritten below; the init stream is irrelevant
    let mut net = BeamsNet::new(header.config, &mut rng_from_seed(0))?;
    net.set_input_scaling(header.input_scaling)
        .map_err(|e| DataError::CorruptContainer(e.to_string()))?;
    let expected: Vec<(String, Vec<usize>)> = net
        .model()
        .params()
        .iter()
        .map(|p| (p.name.clone(), p.value.shape().to_vec()))
        .collect();
    if expected.len() != header.tensors.len() {
        return Err(corrupt("tensor count does not match architecture"));
    }
    let mut payload = body[hend..].chunks_exact(8);
    if payload.len() * 8 != body.len() - hend {
        return Err(corrupt("payload is not a whole number of f64"));
    }
    let total: usize = header.tensors.iter().map(|t| t.shape.iter().product::<usize>()).sum();
    if payload.len() != total {
        return Err(corrupt("payload size does not match tensor table"));
    }
    for (entry, (name, shape)) in header.tensors.iter().zip(&expected) {
        if &entry.name != name || &entry.shape != shape {
            return Err(DataError::CorruptContainer(format!(
                "tensor {} {:?} does not match architecture ({name} {shape:?})",
                entry.name, entry.shape
            )));
        }
        let n: usize = shape.iter().product();
        let data: Vec<f64> = payload
            .by_ref()
            .take(n)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let t = Tensor::new(shape.clone(), data).map_err(crate::model::ModelError::from)?;
        net.model_mut().set_param(name, t).map_err(crate::model::ModelError::from)?;
    }
    Ok((net, header.meta))
}

pub fn save_checkpoint(net: &BeamsNet, meta: &CheckpointMeta, path: &Path) -> Result<(), DataError> {
    let bytes = encode_checkpoint(net, meta)?;
    std::fs::write(path, bytes).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<(BeamsNet, CheckpointMeta), DataError> {
    let bytes = std::fs::read(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_checkpoint(&bytes)
}

/// Load and require a specific architecture.
pub fn load_checkpoint_as(path: &Path, variant: Variant) -> Result<(BeamsNet, CheckpointMeta), DataError> {
    let (net, meta) = load_checkpoint(path)?;
    if net.variant() != variant {
        return Err(DataError::VariantMismatch {
            expected: variant.to_string(),
            found: net.variant().to_string(),
        });
    }
    Ok((net, meta))
}
