use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DiscourseGraph, NodeType};
use crate::corpus::DocType;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimConfig {
    /// Probability of keeping each eligible document node.
    pub keep_fraction: f64,
    /// Hard cap applied after the random drop.
    pub max_nodes: Option<usize>,
}

impl Default for TrimConfig {
    fn default() -> Self {
        TrimConfig {
            keep_fraction: 0.2,
            max_nodes: Some(500),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimReport {
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub eligible: usize,
    pub retained_eligible: usize,
}

/// Randomly drops news, tweet and press-release nodes that are not linked to
/// `target_event`, each kept independently with probability `keep_fraction`.
/// Other node types, `protected` nodes and the target event's documents are
/// always kept. If the graph still exceeds `max_nodes`, further eligible
/// nodes are dropped uniformly at random, news first, then tweets, then
/// press releases.
///
/// Node payloads are left as built: trimming bounds the attention graph, not
/// the documents each node is encoded from.
pub fn trim_graph<R: Rng>(
    g: &DiscourseGraph,
    target_event: Option<usize>,
    protected: &[usize],
    cfg: &TrimConfig,
    rng: &mut R,
) -> Result<(DiscourseGraph, TrimReport)> {
    if !(cfg.keep_fraction > 0.0 && cfg.keep_fraction <= 1.0) {
        return Err(Error::Validation(format!(
            "keep_fraction {} outside (0, 1]",
            cfg.keep_fraction
        )));
    }
    if let Some(t) = target_event {
        if t >= g.len() || g.node(t).node_type() != NodeType::Event {
            return Err(Error::Graph(format!("trim target {t} is not an event node")));
        }
    }
    if g.indices_of(NodeType::AuthorEntity).is_empty() {
        return Err(Error::Graph(
            "graph has no author node; nothing viable to trim".into(),
        ));
    }

    let eligible: Vec<usize> = (0..g.len())
        .filter(|&i| {
            matches!(
                g.node(i).kind.doc_type(),
                Some(DocType::News | DocType::Tweet | DocType::PressRelease)
            ) && !protected.contains(&i)
                && target_event.is_none_or(|t| !g.linked(t, i))
        })
        .collect();

    let mut keep = vec![true; g.len()];
    for &i in &eligible {
        keep[i] = rng.gen::<f64>() < cfg.keep_fraction;
    }

    if let Some(max) = cfg.max_nodes {
        let mut count = keep.iter().filter(|&&k| k).count();
        for t in [DocType::News, DocType::Tweet, DocType::PressRelease] {
            if count <= max {
                break;
            }
            let mut pool: Vec<usize> = eligible
                .iter()
                .copied()
                .filter(|&i| keep[i] && g.node(i).kind.doc_type() == Some(t))
                .collect();
            pool.shuffle(rng);
            for i in pool {
                if count <= max {
                    break;
                }
                keep[i] = false;
                count -= 1;
            }
        }
    }

    let trimmed = g.retain_nodes(&keep);
    let report = TrimReport {
        nodes_before: g.len(),
        nodes_after: trimmed.len(),
        eligible: eligible.len(),
        retained_eligible: eligible.iter().filter(|&&i| keep[i]).count(),
    };
    Ok((trimmed, report))
}
