//! Binary checkpoint format, little-endian throughout:
//!
//! ```text
//! magic "CRCKPT\0\0" | u32 version | u32 len | JSON metadata (len bytes)
//! u32 tensor count
//! per tensor: u32 name len | name | u32 ndim | u64 dims[ndim] | f64 data
//! ```
//!
//! Metadata carries the model configuration under `"model"`.

use std::fs;
use std::path::Path;

use serde_json::Value;

use super::{Model, ModelConfig};
use crate::error::{Error, Result};
use crate::params::Parameters;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"CRCKPT\0\0";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Serialises `model` with `metadata`; the `"model"` key is overwritten
/// with the model configuration.
pub fn checkpoint_bytes(model: &Model, metadata: &Value) -> Result<Vec<u8>> {
    let mut meta = match metadata {
        Value::Object(m) => m.clone(),
        Value::Null => serde_json::Map::new(),
        _ => return Err(Error::Checkpoint("metadata must be a JSON object".into())),
    };
    meta.insert(
        "model".into(),
        serde_json::to_value(model.config).map_err(|e| Error::Checkpoint(e.to_string()))?,
    );
    let json = serde_json::to_vec(&Value::Object(meta)).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let tensors = model.tensors();
    let mut out = Vec::with_capacity(8 * model.num_params() + 4096);
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&u32_len(json.len())?.to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&u32_len(tensors.len())?.to_le_bytes());
    for (name, t) in tensors {
        out.extend_from_slice(&u32_len(name.len())?.to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&u32_len(t.ndim())?.to_le_bytes());
        for &dim in t.shape() {
            out.extend_from_slice(&(dim as u64).to_le_bytes());
        }
        for v in t.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

fn u32_len(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Checkpoint(format!("length {n} exceeds u32")))
}

pub fn write_checkpoint(path: impl AsRef<Path>, model: &Model, metadata: &Value) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint_bytes(model, metadata)?).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Parses checkpoint bytes, checking every tensor name and shape against
/// the configured model.
pub fn parse_checkpoint(bytes: &[u8]) -> Result<(Model, Value)> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let len = r.u32()? as usize;
    let meta: Value =
        serde_json::from_slice(r.take(len)?).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let config: ModelConfig = serde_json::from_value(
        meta.get("model")
            .cloned()
            .ok_or_else(|| Error::Checkpoint("metadata lacks model config".into()))?,
    )
    .map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut model = Model::zeros(config)?;
    let count = r.u32()? as usize;
    let mut slots = model.tensors_mut();
    if count != slots.len() {
        return Err(Error::Checkpoint(format!(
            "{count} tensors stored, model has {}",
            slots.len()
        )));
    }
    for (expected, t) in slots.iter_mut() {
        let n = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(n)?).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if name != expected {
            return Err(Error::Checkpoint(format!("expected tensor {expected}, found {name}")));
        }
        let ndim = r.u32()? as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(r.u64()? as usize);
        }
        if shape != t.shape() {
            return Err(Error::Checkpoint(format!(
                "tensor {name}: stored shape {shape:?}, expected {:?}",
                t.shape()
            )));
        }
        for v in t.iter_mut() {
            *v = f64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes"));
        }
    }
    drop(slots);
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint("trailing bytes".into()));
    }
    Ok((model, meta))
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<(Model, Value)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_checkpoint(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::ModelMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> ModelConfig {
        ModelConfig {
            mode: ModelMode::CompositionalReader,
            d_model: 6,
            n_heads: 2,
            d_k: 3,
            d_v: 3,
            n_layers: 2,
            head_hidden: 5,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = Model::new(toy(), &mut rng).unwrap();
        let bytes = checkpoint_bytes(&m, &serde_json::json!({"note": "x"})).unwrap();
        let (back, meta) = parse_checkpoint(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(meta["note"], "x");
    }

    #[test]
    fn truncation_is_detected() {
        let m = Model::zeros(toy()).unwrap();
        let bytes = checkpoint_bytes(&m, &Value::Null).unwrap();
        assert!(matches!(
            parse_checkpoint(&bytes[..bytes.len() - 1]),
            Err(Error::Checkpoint(_))
        ));
    }
}
