use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::Task;

/// Loss and classification quality over a set of samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    pub samples: usize,
    pub loss: f64,
    pub accuracy: f64,
    /// F1 of the positive class; 0 when it is undefined.
    pub f1: f64,
}

/// Streaming accumulator for [`TaskMetrics`].
#[derive(Clone, Copy, Debug, Default)]
pub struct MetricAccumulator {
    n: usize,
    loss: f64,
    correct: usize,
    tp: usize,
    fp: usize,
    fn_: usize,
}

impl MetricAccumulator {
    /// Records one prediction; positive iff `p_positive > 0.5`.
    pub fn add(&mut self, loss: f64, p_positive: f64, label: bool) {
        let pred = p_positive > 0.5;
        self.n += 1;
        self.loss += loss;
        self.correct += usize::from(pred == label);
        match (pred, label) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => {}
        }
    }

    pub fn finish(&self) -> TaskMetrics {
        if self.n == 0 {
            return TaskMetrics::default();
        }
        let denom = 2 * self.tp + self.fp + self.fn_;
        TaskMetrics {
            samples: self.n,
            loss: self.loss / self.n as f64,
            accuracy: self.correct as f64 / self.n as f64,
            f1: if denom == 0 {
                0.0
            } else {
                2.0 * self.tp as f64 / denom as f64
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
    /// Test samples of authors never trained on.
    OutSample,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::OutSample => "out_sample",
        }
    }
}

/// One metrics-log line. `epoch` is `None` for scores of the selected
/// best-validation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub batch: usize,
    pub epoch: Option<usize>,
    pub split: Split,
    pub task: Task,
    pub metrics: TaskMetrics,
}

pub const METRICS_HEADER: &str = "batch\tepoch\tsplit\ttask\tsamples\tloss\taccuracy\tf1_positive";

/// Tab-separated metrics log with a header line.
pub fn render_metrics_log(records: &[MetricRecord]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in records {
        let epoch = r.epoch.map_or_else(|| "best".to_string(), |e| e.to_string());
        let _ = writeln!(
            out,
            "{}\t{epoch}\t{}\t{}\t{}\t{:.10}\t{:.10}\t{:.10}",
            r.batch,
            r.split.as_str(),
            r.task.as_str(),
            r.metrics.samples,
            r.metrics.loss,
            r.metrics.accuracy,
            r.metrics.f1
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_counts() {
        let mut acc = MetricAccumulator::default();
        acc.add(0.1, 0.9, true);
        acc.add(0.2, 0.8, false);
        acc.add(0.3, 0.2, true);
        acc.add(0.4, 0.1, false);
        let m = acc.finish();
        assert_eq!(m.samples, 4);
        assert!((m.loss - 0.25).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.5);
        // tp=1, fp=1, fn=1
        assert_eq!(m.f1, 0.5);
    }

    #[test]
    fn exact_half_is_negative() {
        let mut acc = MetricAccumulator::default();
        acc.add(0.0, 0.5, false);
        assert_eq!(acc.finish().accuracy, 1.0);
    }
}
