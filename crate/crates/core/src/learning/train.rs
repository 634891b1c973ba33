use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::checkpoint::checkpoint_bytes;
use super::metrics::{render_metrics_log, MetricAccumulator, MetricRecord, Split, TaskMetrics};
use super::{
    make_authorship_samples, make_refent_samples, LinkSample, Model, ModelConfig, SampleConfig, Sgd,
    Task,
};
use crate::corpus::Corpus;
use crate::embeddings::EmbeddingProvider;
use crate::encoder::DocumentVectors;
use crate::error::{Error, Result};
use crate::graphgen::{build_graph, resolve_query, NodeKind, QueryTriplet};
use crate::params::Parameters;

pub const DEFAULT_SEED: u64 = 4056;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub seed: u64,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Only 1 is supported.
    pub batch_size: usize,
    pub epochs_per_query_batch: usize,
    /// Politicians per query batch; each contributes one query per issue.
    pub politicians_per_batch: usize,
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub tasks: Vec<Task>,
    pub samples: SampleConfig,
    /// Stop after this many query batches.
    pub max_batches: Option<usize>,
    /// Train on two-thirds of the politicians and score the rest.
    pub out_sample: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: DEFAULT_SEED,
            learning_rate: 0.0075,
            momentum: 0.4,
            batch_size: 1,
            epochs_per_query_batch: 5,
            politicians_per_batch: 3,
            train_fraction: 0.65,
            validation_fraction: 0.175,
            tasks: Task::ALL.to_vec(),
            samples: SampleConfig::default(),
            max_batches: None,
            out_sample: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.batch_size != 1 {
            return bad(format!("batch_size {} unsupported; only 1", self.batch_size));
        }
        if self.epochs_per_query_batch == 0 || self.politicians_per_batch == 0 {
            return bad("epochs and politicians per batch must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} must be positive", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        let (t, v) = (self.train_fraction, self.validation_fraction);
        if !(t > 0.0 && v >= 0.0 && t + v <= 1.0) {
            return bad(format!("split fractions {t}/{v} invalid"));
        }
        if self.tasks.is_empty() {
            return bad("no tasks selected".into());
        }
        if !(self.samples.negative_ratio >= 0.0 && self.samples.negative_ratio.is_finite()) {
            return bad("negative_ratio must be non-negative".into());
        }
        Ok(())
    }
}

/// Independent random streams derived from the seed.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

const STREAM_INIT: u64 = 0;
const STREAM_ORDER: u64 = 1;
const STREAM_SAMPLES: u64 = 2;
const STREAM_SPLIT: u64 = 3;
const STREAM_SHUFFLE: u64 = 4;

/// Splits shuffled politicians into a training two-thirds (rounded) and the
/// held-out rest.
pub fn out_sample_split(shuffled: &[String]) -> Result<(Vec<String>, Vec<String>)> {
    let n_train = (2 * shuffled.len()).div_ceil(3);
    let (train, held) = shuffled.split_at(n_train);
    let a: BTreeSet<&String> = train.iter().collect();
    if held.iter().any(|h| a.contains(h)) || a.len() != train.len() {
        return Err(Error::Validation("out-sample author sets overlap".into()));
    }
    Ok((train.to_vec(), held.to_vec()))
}

/// Samples of one query batch split three ways.
#[derive(Clone, Debug, Default)]
pub struct BatchSamples {
    pub train: Vec<LinkSample>,
    pub validation: Vec<LinkSample>,
    pub test: Vec<LinkSample>,
}

impl BatchSamples {
    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Samples of every query (politician x issue) for `politicians`.
pub fn query_batch_samples(
    corpus: &Corpus,
    politicians: &[String],
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<LinkSample>> {
    let issues: Vec<String> = corpus.issues().map(|i| i.id.clone()).collect();
    let mut out = Vec::new();
    for p in politicians {
        for issue in &issues {
            let q = QueryTriplet::for_author_issue(corpus, p, issue);
            let result = resolve_query(corpus, &q)?;
            let has_discourse = result
                .documents
                .iter()
                .any(|d| d.doc_type.is_first_person() && d.author_id.as_deref() == Some(p));
            if !has_discourse {
                continue;
            }
            let graph = build_graph(&result)?;
            let author = graph
                .find(&NodeKind::Author(p.clone()))
                .ok_or_else(|| Error::Graph(format!("author {p} missing from its graph")))?;
            for task in &config.tasks {
                match task {
                    Task::Authorship => out.extend(make_authorship_samples(
                        corpus,
                        &graph,
                        author,
                        &config.samples,
                        rng,
                    )?),
                    Task::RefEntity => {
                        out.extend(make_refent_samples(corpus, &graph, &config.samples, rng)?)
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Splits each task's samples independently after a shuffle.
pub fn split_samples(samples: Vec<LinkSample>, config: &TrainConfig, rng: &mut ChaCha8Rng) -> BatchSamples {
    let mut by_task: BTreeMap<Task, Vec<LinkSample>> = BTreeMap::new();
    for s in samples {
        by_task.entry(s.task).or_default().push(s);
    }
    let mut out = BatchSamples::default();
    for (_, mut v) in by_task {
        v.shuffle(rng);
        let n = v.len();
        let n_train = (config.train_fraction * n as f64).round() as usize;
        let n_val = ((config.validation_fraction * n as f64).round() as usize).min(n - n_train);
        let test = v.split_off(n_train + n_val);
        let val = v.split_off(n_train);
        out.train.extend(v);
        out.validation.extend(val);
        out.test.extend(test);
    }
    out
}

/// Per-task metrics of `model` on `samples`.
pub fn evaluate_samples(
    model: &Model,
    samples: &[LinkSample],
    corpus: &Corpus,
    vectors: &mut DocumentVectors<'_>,
) -> Result<BTreeMap<Task, TaskMetrics>> {
    let mut acc: BTreeMap<Task, MetricAccumulator> = BTreeMap::new();
    for s in samples {
        let fwd = model.link_forward(s, corpus, vectors)?;
        let loss = super::cross_entropy(fwd.probs().view(), s.label);
        acc.entry(s.task).or_default().add(loss, fwd.probability(), s.label);
    }
    Ok(acc.into_iter().map(|(t, a)| (t, a.finish())).collect())
}

/// Sizes of the train, validation and test splits of one batch and task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub batch: usize,
    pub task: Task,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

pub struct TrainOutcome {
    pub model: Model,
    pub records: Vec<MetricRecord>,
    pub split_sizes: Vec<SplitSizes>,
    pub politician_order: Vec<String>,
    pub held_out: Vec<String>,
    pub checkpoint: Vec<u8>,
}

impl TrainOutcome {
    pub fn metrics_log(&self) -> String {
        render_metrics_log(&self.records)
    }

    /// Metrics recorded for the selected parameters of `batch`.
    pub fn best(&self, batch: usize, split: Split, task: Task) -> Option<TaskMetrics> {
        self.records
            .iter()
            .find(|r| r.batch == batch && r.epoch.is_none() && r.split == split && r.task == task)
            .map(|r| r.metrics)
    }
}

fn mean_accuracy(m: &BTreeMap<Task, TaskMetrics>) -> Option<f64> {
    let vals: Vec<f64> = m.values().filter(|t| t.samples > 0).map(|t| t.accuracy).collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Trains the shared encoder and composer with one head per task.
///
/// Politicians are shuffled and grouped into query batches. Each batch is
/// trained for the configured epochs at batch size 1; the parameters with
/// the best mean per-task validation accuracy (first epoch wins ties) are
/// restored and carried into the next batch, with optimizer momentum reset.
pub fn train(
    corpus: &Corpus,
    provider: &dyn EmbeddingProvider,
    model_config: ModelConfig,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if provider.dim() != model_config.d_model {
        return Err(Error::Shape(format!(
            "provider dimension {} != model width {}",
            provider.dim(),
            model_config.d_model
        )));
    }
    let mut model = Model::new(model_config, &mut stream(config.seed, STREAM_INIT))?;
    let mut sgd = Sgd::new(&model, config.learning_rate, config.momentum);
    let mut vectors = DocumentVectors::new(provider);

    let mut politicians: Vec<String> = corpus.authors().into_iter().map(String::from).collect();
    politicians.shuffle(&mut stream(config.seed, STREAM_ORDER));
    let (trainees, held_out) = if config.out_sample {
        out_sample_split(&politicians)?
    } else {
        (politicians.clone(), Vec::new())
    };

    let mut sample_rng = stream(config.seed, STREAM_SAMPLES);
    let mut split_rng = stream(config.seed, STREAM_SPLIT);
    let mut shuffle_rng = stream(config.seed, STREAM_SHUFFLE);
    let mut records = Vec::new();
    let mut split_sizes = Vec::new();

    let batches: Vec<&[String]> = trainees.chunks(config.politicians_per_batch).collect();
    let n_batches = config.max_batches.map_or(batches.len(), |m| m.min(batches.len()));
    for (b, chunk) in batches.into_iter().take(n_batches).enumerate() {
        let samples = query_batch_samples(corpus, chunk, config, &mut sample_rng)?;
        let mut split = split_samples(samples, config, &mut split_rng);
        for task in &config.tasks {
            let count = |v: &[LinkSample]| v.iter().filter(|s| s.task == *task).count();
            split_sizes.push(SplitSizes {
                batch: b,
                task: *task,
                train: count(&split.train),
                validation: count(&split.validation),
                test: count(&split.test),
            });
        }
        if split.train.is_empty() {
            warn!("query batch {b} ({}) has no training samples; skipped", chunk.join(","));
            continue;
        }
        info!(
            "batch {b}: {} train, {} validation, {} test samples",
            split.train.len(),
            split.validation.len(),
            split.test.len()
        );

        let mut best: Option<(f64, Model)> = None;
        for epoch in 0..config.epochs_per_query_batch {
            split.train.shuffle(&mut shuffle_rng);
            let mut acc: BTreeMap<Task, MetricAccumulator> = BTreeMap::new();
            let mut grads = model.zeros_like();
            for s in &split.train {
                grads.fill_zero();
                let fwd = model.link_forward(s, corpus, &mut vectors)?;
                let loss = model.link_backward(&fwd, s, &mut grads);
                if !loss.is_finite() || !grads.is_finite() {
                    return Err(Error::Validation(format!(
                        "non-finite loss or gradient in batch {b} epoch {epoch}"
                    )));
                }
                acc.entry(s.task).or_default().add(loss, fwd.probability(), s.label);
                sgd.step(&mut model, &grads, s.task);
            }
            for (task, a) in acc {
                records.push(MetricRecord {
                    batch: b,
                    epoch: Some(epoch),
                    split: Split::Train,
                    task,
                    metrics: a.finish(),
                });
            }
            let val = evaluate_samples(&model, &split.validation, corpus, &mut vectors)?;
            for (&task, &metrics) in &val {
                records.push(MetricRecord {
                    batch: b,
                    epoch: Some(epoch),
                    split: Split::Validation,
                    task,
                    metrics,
                });
            }
            // Without validation samples the latest parameters are kept.
            let score = mean_accuracy(&val).unwrap_or(f64::INFINITY);
            if best.as_ref().is_none_or(|(s, _)| score > *s || score == f64::INFINITY) {
                best = Some((score, model.clone()));
            }
        }
        if let Some((_, m)) = best {
            model = m;
        }
        sgd.reset();
        let test = evaluate_samples(&model, &split.test, corpus, &mut vectors)?;
        for (split_kind, metrics) in [
            (Split::Validation, evaluate_samples(&model, &split.validation, corpus, &mut vectors)?),
            (Split::Test, test),
        ] {
            for (task, m) in metrics {
                records.push(MetricRecord {
                    batch: b,
                    epoch: None,
                    split: split_kind,
                    task,
                    metrics: m,
                });
            }
        }
    }

    if !held_out.is_empty() {
        let samples = query_batch_samples(corpus, &held_out, config, &mut sample_rng)?;
        let split = split_samples(samples, config, &mut split_rng);
        for (task, m) in evaluate_samples(&model, &split.test, corpus, &mut vectors)? {
            records.push(MetricRecord {
                batch: n_batches,
                epoch: None,
                split: Split::OutSample,
                task,
                metrics: m,
            });
        }
    }

    let metadata = json!({
        "train": config,
        "politician_order": politicians,
        "held_out": held_out,
        "split_sizes": split_sizes,
        "batches": n_batches,
    });
    let checkpoint = checkpoint_bytes(&model, &metadata)?;
    Ok(TrainOutcome {
        model,
        records,
        split_sizes,
        politician_order: politicians,
        held_out,
        checkpoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_sample_split_is_disjoint_two_thirds() {
        let names: Vec<String> = (0..7).map(|i| format!("p{i}")).collect();
        let (a, b) = out_sample_split(&names).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(b.len(), 2);
        assert!(a.iter().all(|x| !b.contains(x)));
    }

    #[test]
    fn duplicate_politicians_are_rejected() {
        let names = vec!["a".to_string(), "a".to_string(), "b".to_string()];
        assert!(out_sample_split(&names).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let c = TrainConfig {
            batch_size: 4,
            ..TrainConfig::default()
        };
        assert!(c.validate().is_err());
        let c = TrainConfig {
            momentum: 1.0,
            ..TrainConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
