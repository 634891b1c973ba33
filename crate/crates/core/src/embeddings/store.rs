//! Binary embedding store.
//!
//! Data file: a sequence of records, each
//!
//! ```text
//! u32 LE  key length
//! bytes   key (UTF-8)
//! u32 LE  row count s
//! u32 LE  dimension d
//! f32 LE  s*d values, row-major
//! ```
//!
//! Index file (`<data>.idx`): one `key<TAB>byte offset` line per record,
//! sorted by key.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

pub const INDEX_SUFFIX: &str = "idx";

fn index_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".");
    name.push(INDEX_SUFFIX);
    PathBuf::from(name)
}

pub struct EmbeddingStoreWriter {
    path: PathBuf,
    out: BufWriter<File>,
    offset: u64,
    dim: Option<usize>,
    index: BTreeMap<String, u64>,
}

impl EmbeddingStoreWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(EmbeddingStoreWriter {
            path,
            out: BufWriter::new(f),
            offset: 0,
            dim: None,
            index: BTreeMap::new(),
        })
    }

    /// Appends one record. Every record in a store shares one dimension.
    pub fn append(&mut self, key: &str, rows: ArrayView2<f64>) -> Result<()> {
        if key.contains(['\t', '\n']) {
            return Err(Error::Validation(format!("store key {key:?} contains tab or newline")));
        }
        if self.index.contains_key(key) {
            return Err(Error::Validation(format!("duplicate store key {key:?}")));
        }
        let d = rows.ncols();
        match self.dim {
            Some(dim) if dim != d => {
                return Err(Error::Shape(format!(
                    "record {key:?} has dimension {d}, store has {dim}"
                )))
            }
            _ => self.dim = Some(d),
        }
        let mut buf = Vec::with_capacity(12 + key.len() + rows.len() * 4);
        buf.extend_from_slice(&(key.len() as u32).to_le_bytes());
        buf.extend_from_slice(key.as_bytes());
        buf.extend_from_slice(&(rows.nrows() as u32).to_le_bytes());
        buf.extend_from_slice(&(d as u32).to_le_bytes());
        for v in rows.iter() {
            buf.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        self.out
            .write_all(&buf)
            .map_err(|e| Error::io(&self.path, e))?;
        self.index.insert(key.to_string(), self.offset);
        self.offset += buf.len() as u64;
        Ok(())
    }

    /// Flushes the data file and writes the sorted index next to it.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        let idx = index_path(&self.path);
        let mut text = String::new();
        for (k, off) in &self.index {
            text.push_str(k);
            text.push('\t');
            text.push_str(&off.to_string());
            text.push('\n');
        }
        fs::write(&idx, text).map_err(|e| Error::io(&idx, e))?;
        Ok(self.path)
    }
}

/// Read side of the store. Records are read on demand.
#[derive(Debug)]
pub struct EmbeddingStore {
    path: PathBuf,
    file: Mutex<File>,
    index: BTreeMap<String, u64>,
    dim: usize,
}

impl EmbeddingStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let idx = index_path(&path);
        let text = fs::read_to_string(&idx).map_err(|e| Error::io(&idx, e))?;
        let mut index = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let (key, off) = line.rsplit_once('\t').ok_or_else(|| {
                Error::schema(format!("{}:{}", idx.display(), n + 1), "missing tab")
            })?;
            let off: u64 = off.parse().map_err(|_| {
                Error::schema(format!("{}:{}", idx.display(), n + 1), "bad offset")
            })?;
            index.insert(key.to_string(), off);
        }
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut store = EmbeddingStore {
            path,
            file: Mutex::new(file),
            index,
            dim: 0,
        };
        if let Some(first) = store.index.keys().next().cloned() {
            store.dim = store.get(&first)?.ncols();
        }
        Ok(store)
    }

    /// Dimension of the stored rows (0 for an empty store).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    /// Rows stored under `key`, widened to f64 exactly.
    pub fn get(&self, key: &str) -> Result<Array2<f64>> {
        let &offset = self
            .index
            .get(key)
            .ok_or_else(|| Error::MissingEmbedding(key.to_string()))?;
        let corrupt = |msg: &str| Error::schema(format!("{} record {key:?}", self.path.display()), msg);
        let mut f = self.file.lock().expect("store file lock poisoned");
        f.seek(SeekFrom::Start(offset))
            .map_err(|e| Error::io(&self.path, e))?;
        let mut word = [0u8; 4];
        let mut read_u32 = |f: &mut File| -> Result<u32> {
            f.read_exact(&mut word).map_err(|e| Error::io(&self.path, e))?;
            Ok(u32::from_le_bytes(word))
        };
        let klen = read_u32(&mut f)? as usize;
        let mut kbytes = vec![0u8; klen];
        f.read_exact(&mut kbytes)
            .map_err(|e| Error::io(&self.path, e))?;
        if kbytes != key.as_bytes() {
            return Err(corrupt("index points at a different key"));
        }
        let s = read_u32(&mut f)? as usize;
        let d = read_u32(&mut f)? as usize;
        if self.dim != 0 && d != self.dim {
            return Err(corrupt("dimension differs from store dimension"));
        }
        let mut raw = vec![0u8; s * d * 4];
        f.read_exact(&mut raw).map_err(|e| Error::io(&self.path, e))?;
        let values: Vec<f64> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        Array2::from_shape_vec((s, d), values).map_err(|e| corrupt(&e.to_string()))
    }
}
