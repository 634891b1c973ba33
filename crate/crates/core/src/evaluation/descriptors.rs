use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::stance::{stance_embedding, StanceSource};
use crate::corpus::Corpus;
use crate::embeddings::{embed_token_occurrence, EmbeddingProvider};
use crate::encoder::DocumentVectors;
use crate::error::Result;
use crate::tensor::cosine;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub word: String,
    pub score: f64,
    pub occurrences: usize,
}

/// Ranks candidates by cosine similarity of their mean occurrence vector
/// with `n_issue`; ties go to the lexicographically smaller word.
pub fn rank_descriptors(
    occurrences: &BTreeMap<String, Vec<Array1<f64>>>,
    n_issue: &Array1<f64>,
    top_k: usize,
) -> Vec<Descriptor> {
    let mut out: Vec<Descriptor> = occurrences
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(word, vs)| {
            let mut mean = Array1::zeros(n_issue.len());
            for v in vs {
                mean += v;
            }
            mean /= vs.len() as f64;
            Descriptor {
                word: word.clone(),
                score: cosine(mean.view(), n_issue.view()),
                occurrences: vs.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.word.cmp(&b.word)));
    out.truncate(top_k);
    out
}

/// Adjectives from `author`'s first-person documents on `issue`, ranked
/// against the composed issue embedding of the author-issue graph.
pub fn opinion_descriptors(
    source: StanceSource<'_>,
    corpus: &Corpus,
    provider: &dyn EmbeddingProvider,
    author: &str,
    issue: &str,
    top_k: usize,
) -> Result<Vec<Descriptor>> {
    let mut vectors = DocumentVectors::new(provider);
    let stance = stance_embedding(source, corpus, &mut vectors, author, issue, None, &BTreeSet::new())?;
    let mut occurrences: BTreeMap<String, Vec<Array1<f64>>> = BTreeMap::new();
    for doc in corpus.documents_by_author(author) {
        if !doc.doc_type.is_first_person() || !corpus.in_issue(&doc.id, issue) {
            continue;
        }
        for (s, t) in doc.adjective_positions() {
            let word = doc.sentences[s][t].to_lowercase();
            let v = embed_token_occurrence(provider, doc, s, t)?.vector;
            occurrences.entry(word).or_default().push(v);
        }
    }
    if occurrences.is_empty() {
        warn!("{author} uses no adjectives on {issue}");
    }
    Ok(rank_descriptors(&occurrences, &stance.n_issue, top_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn singleton_is_ranked_first() {
        let occ = BTreeMap::from([("only".to_string(), vec![array![1.0, -2.0]])]);
        let r = rank_descriptors(&occ, &array![-1.0, 0.0], 5);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].word, "only");
    }

    #[test]
    fn ties_break_lexicographically() {
        let occ = BTreeMap::from([
            ("zeta".to_string(), vec![array![1.0, 0.0]]),
            ("alpha".to_string(), vec![array![2.0, 0.0]]),
        ]);
        let r = rank_descriptors(&occ, &array![1.0, 0.0], 5);
        assert_eq!(r[0].word, "alpha");
    }
}
