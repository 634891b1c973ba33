//! Burst-based news event segmentation.
//!
//! A day whose article count exceeds `mean + std` of the issue's whole daily
//! series starts an event; the following `skip_days` days cannot start
//! another one. Gaps in the series count as zero-article days.

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};

use super::{EventRecord, MAX_EVENT_SPAN_DAYS};
use crate::error::{Error, Result};

/// Mean and population standard deviation of a daily series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurstThreshold {
    pub mean: f64,
    pub std: f64,
}

impl BurstThreshold {
    pub fn value(&self) -> f64 {
        self.mean + self.std
    }
}

/// Statistics over a dense series of counts.
pub fn burst_threshold(counts: &[i64]) -> BurstThreshold {
    if counts.is_empty() {
        return BurstThreshold {
            mean: 0.0,
            std: 0.0,
        };
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    BurstThreshold {
        mean,
        std: var.sqrt(),
    }
}

/// Exact test for `count > mean + std` in integer arithmetic:
/// `n*c - sum > 0` and `(n*c - sum)^2 > n*sumsq - sum^2`.
struct ExactThreshold {
    n: i128,
    sum: i128,
    spread: i128,
}

impl ExactThreshold {
    fn new(counts: &[i64]) -> Self {
        let n = counts.len() as i128;
        let sum: i128 = counts.iter().map(|&c| c as i128).sum();
        let sumsq: i128 = counts.iter().map(|&c| (c as i128) * (c as i128)).sum();
        ExactThreshold {
            n,
            sum,
            spread: n * sumsq - sum * sum,
        }
    }

    fn exceeded_by(&self, count: i64) -> bool {
        let lhs = self.n * count as i128 - self.sum;
        lhs > 0 && lhs * lhs > self.spread
    }
}

/// Segments one issue's daily article counts into events.
pub fn detect_issue_events(
    issue_id: &str,
    counts: &BTreeMap<NaiveDate, i64>,
    skip_days: u32,
) -> Result<Vec<EventRecord>> {
    let (Some((&first, _)), Some((&last, _))) =
        (counts.first_key_value(), counts.last_key_value())
    else {
        return Ok(Vec::new());
    };
    if let Some((d, c)) = counts.iter().find(|(_, &c)| c < 0) {
        return Err(Error::Validation(format!(
            "negative article count {c} on {d} for issue {issue_id}"
        )));
    }

    let days = (last - first).num_days() as usize + 1;
    let mut dense = vec![0i64; days];
    for (d, &c) in counts {
        dense[(*d - first).num_days() as usize] = c;
    }
    let threshold = ExactThreshold::new(&dense);

    let mut starts = Vec::new();
    let mut next_allowed = 0usize;
    for (day, &c) in dense.iter().enumerate() {
        if day >= next_allowed && threshold.exceeded_by(c) {
            starts.push(day);
            next_allowed = day + skip_days as usize + 1;
        }
    }

    let cap = (MAX_EVENT_SPAN_DAYS - 1) as usize;
    let mut events = Vec::with_capacity(starts.len());
    for (k, &s) in starts.iter().enumerate() {
        let mut end = (s + cap).min(days - 1);
        if let Some(&next) = starts.get(k + 1) {
            end = end.min(next - 1);
        }
        events.push(EventRecord {
            issue_id: issue_id.to_string(),
            index: k as u32,
            start_date: first + Days::new(s as u64),
            end_date: first + Days::new(end as u64),
            news_doc_ids: Vec::new(),
        });
    }
    Ok(events)
}

/// Runs [`detect_issue_events`] for every issue, ordered by issue id.
pub fn identify_events(
    daily_counts: &BTreeMap<String, BTreeMap<NaiveDate, i64>>,
    skip_days: u32,
) -> Result<Vec<EventRecord>> {
    let mut out = Vec::new();
    for (issue, counts) in daily_counts {
        out.extend(detect_issue_events(issue, counts, skip_days)?);
    }
    Ok(out)
}
