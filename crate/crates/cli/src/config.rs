//! Pipeline configuration: a TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use compreader::embeddings::{EmbeddingProvider, HashEmbedder, PrecomputedProvider};
use compreader::evaluation::GradePredictConfig;
use compreader::graphgen::TrimConfig;
use compreader::learning::{ModelConfig, TrainConfig};
use log::info;
use serde::Deserialize;

pub const OUT_ENV: &str = "COMPREADER_OUT";
const DEFAULT_OUT: &str = "compreader-out";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    /// Token-hash embeddings; needs no external files.
    #[default]
    Hash,
    /// Rows from a precomputed embedding store.
    Store,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub provider: Option<ProviderKind>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub skip_days: Option<u32>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
    pub trim: Option<TrimConfig>,
    #[serde(default)]
    pub grade_predict: GradePredictConfig,
    /// `true` when `[train]` sets `seed` explicitly.
    #[serde(skip)]
    pub train_seed_given: bool,
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(PipelineConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let table: toml::Table =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let train_seed_given = table
            .get("train")
            .and_then(|t| t.as_table())
            .is_some_and(|t| t.contains_key("seed"));
        let mut cfg: PipelineConfig = table
            .try_into()
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.train_seed_given = train_seed_given;
        Ok(cfg)
    }
}

/// Flag value if given, else the config value; logs when the flag wins.
pub fn overlay<T: PartialEq + std::fmt::Debug>(name: &str, flag: Option<T>, config: Option<T>) -> Option<T> {
    match (flag, config) {
        (Some(f), Some(c)) => {
            if f != c {
                info!("--{name} {f:?} overrides config value {c:?}");
            }
            Some(f)
        }
        (f, c) => f.or(c),
    }
}

/// `--out`, then the environment variable, then the config file.
pub fn output_root(flag: Option<PathBuf>, config: Option<PathBuf>) -> PathBuf {
    if let Some(f) = flag {
        if let Some(c) = &config {
            if *c != f {
                info!("--out {} overrides config value {}", f.display(), c.display());
            }
        }
        return f;
    }
    if let Some(env) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        let env = PathBuf::from(env);
        info!("{OUT_ENV} sets output root {}", env.display());
        return env;
    }
    config.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn existing(path: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    let Some(p) = path else {
        bail!("no {what} given; pass --{what} or set it in the config file");
    };
    if !p.exists() {
        bail!("{what} path {} does not exist", p.display());
    }
    Ok(p)
}

/// The store provider when an embedding store is configured, else token
/// hashing at the model width.
pub fn provider(
    kind: Option<ProviderKind>,
    embeddings: Option<PathBuf>,
    dim: usize,
) -> Result<Box<dyn EmbeddingProvider>> {
    let kind = kind.unwrap_or(if embeddings.is_some() {
        ProviderKind::Store
    } else {
        ProviderKind::Hash
    });
    Ok(match kind {
        ProviderKind::Hash => Box::new(HashEmbedder::new(dim)),
        ProviderKind::Store => {
            let path = existing(embeddings, "embeddings")?;
            Box::new(PrecomputedProvider::open(&path)?)
        }
    })
}
