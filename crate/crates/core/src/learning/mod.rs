//! Self-supervised link prediction: sample construction, fine-tuning heads,
//! the full forward/backward pass and the training schedule.

mod checkpoint;
mod head;
mod metrics;
mod model;
mod samples;
mod train;

pub use checkpoint::{
    checkpoint_bytes, parse_checkpoint, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use head::{cross_entropy, HeadCache, HeadParams, HEAD_HIDDEN};
pub use metrics::{
    render_metrics_log, MetricAccumulator, MetricRecord, Split, TaskMetrics, METRICS_HEADER,
};
pub use model::{LinkForward, Model, ModelConfig, ModelMode, Sgd};
pub use samples::{
    make_authorship_samples, make_refent_samples, LinkSample, MaskedDocument, NegativeBatch,
    SampleConfig, Task,
};
pub use train::{
    evaluate_samples, out_sample_split, query_batch_samples, split_samples, train, BatchSamples,
    SplitSizes, TrainConfig, TrainOutcome, DEFAULT_SEED,
};
