use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocType};
use crate::embeddings::{embed_document, pool_document, EmbeddingProvider};
use crate::encoder::DocumentVectors;
use crate::error::{Error, Result};
use crate::graphgen::{build_graph, resolve_query, DiscourseGraph, NodeKind, QueryResult, QueryTriplet};
use crate::learning::Model;
use crate::tensor::cosine;

use super::ablation_filter;
use std::collections::BTreeSet;

/// Author, issue and optional referenced-entity vectors with their mean.
#[derive(Clone, Debug, PartialEq)]
pub struct StanceEmbedding {
    pub n_auth: Array1<f64>,
    pub n_issue: Array1<f64>,
    pub n_refentity: Option<Array1<f64>>,
    pub n_stance: Array1<f64>,
}

impl StanceEmbedding {
    pub fn new(n_auth: Array1<f64>, n_issue: Array1<f64>, n_refentity: Option<Array1<f64>>) -> Self {
        let mut sum = &n_auth + &n_issue;
        let mut k = 2.0;
        if let Some(r) = &n_refentity {
            sum += r;
            k += 1.0;
        }
        StanceEmbedding {
            n_auth,
            n_issue,
            n_refentity,
            n_stance: sum / k,
        }
    }

    /// Grade-prediction input `[n_auth ; n_issue']` where `n_issue'` is the
    /// mean of the issue and entity vectors when the entity is present.
    pub fn grade_features(&self) -> Array1<f64> {
        let issue = match &self.n_refentity {
            Some(r) => (&self.n_issue + r) / 2.0,
            None => self.n_issue.clone(),
        };
        ndarray::concatenate![ndarray::Axis(0), self.n_auth, issue]
    }
}

/// Outcome of a paraphrase comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParaphraseResult {
    pub positive: bool,
    /// Both similarities were equal; classified positive.
    pub tie: bool,
    pub cos_positive: f64,
    pub cos_negative: f64,
}

/// Higher cosine similarity wins; ties go positive and are flagged.
pub fn classify_stance(
    n_stance: &Array1<f64>,
    pos: &Array1<f64>,
    neg: &Array1<f64>,
) -> ParaphraseResult {
    let cp = cosine(n_stance.view(), pos.view());
    let cn = cosine(n_stance.view(), neg.view());
    ParaphraseResult {
        positive: cp >= cn,
        tie: cp == cn,
        cos_positive: cp,
        cos_negative: cn,
    }
}

/// Where stance vectors come from.
#[derive(Clone, Copy)]
pub enum StanceSource<'m> {
    /// Composed node embeddings of a trained model (in encoder-only mode,
    /// its initial embeddings).
    Model(&'m Model),
    /// Mean-pooled raw document vectors: the author's first-person
    /// discourse, the issue background and the documents mentioning the
    /// entity.
    Baseline,
}

/// Whitespace tokenisation with lowercasing, for representative sentences.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(|t| t.to_lowercase()).collect()
}

/// Query slice and graph of one author on one issue.
pub fn author_issue_graph(
    corpus: &Corpus,
    politician: &str,
    issue: &str,
    exclude: &BTreeSet<DocType>,
) -> Result<(QueryResult, DiscourseGraph)> {
    let q = QueryTriplet::for_author_issue(corpus, politician, issue);
    let result = ablation_filter(&resolve_query(corpus, &q)?, exclude)?;
    let has_discourse = result
        .documents
        .iter()
        .any(|d| d.doc_type.is_first_person() && d.author_id.as_deref() == Some(politician));
    if !has_discourse {
        return Err(Error::Evaluation(format!(
            "{politician} has no discourse on {issue}"
        )));
    }
    let graph = build_graph(&result)?;
    Ok((result, graph))
}

fn node_row(graph: &DiscourseGraph, u: &Array2<f64>, kind: NodeKind) -> Option<Array1<f64>> {
    graph.find(&kind).map(|i| u.row(i).to_owned())
}

/// Stance vectors of `politician` on `issue`, with the entity vector when
/// its node exists in the graph.
pub fn stance_embedding(
    source: StanceSource<'_>,
    corpus: &Corpus,
    vectors: &mut DocumentVectors<'_>,
    politician: &str,
    issue: &str,
    ref_entity: Option<&str>,
    exclude: &BTreeSet<DocType>,
) -> Result<StanceEmbedding> {
    let (result, graph) = author_issue_graph(corpus, politician, issue, exclude)?;
    match source {
        StanceSource::Model(model) => {
            let (_, composed) = model.embed_graph(&graph, corpus, vectors, None)?;
            let u = &composed.u;
            let auth = node_row(&graph, u, NodeKind::Author(politician.into()))
                .ok_or_else(|| Error::Evaluation(format!("no node for {politician}")))?;
            let iss = node_row(&graph, u, NodeKind::Issue(issue.into()))
                .ok_or_else(|| Error::Evaluation(format!("no node for issue {issue}")))?;
            let ent = ref_entity.and_then(|e| node_row(&graph, u, NodeKind::ReferencedEntity(e.into())));
            Ok(StanceEmbedding::new(auth, iss, ent))
        }
        StanceSource::Baseline => {
            let mean_of = |ids: Vec<&str>| -> Result<Option<Array1<f64>>> {
                if ids.is_empty() {
                    return Ok(None);
                }
                let mut acc = Array1::zeros(vectors.dim());
                for id in &ids {
                    let doc = corpus
                        .document(id)
                        .ok_or_else(|| Error::Evaluation(format!("document {id} missing")))?;
                    acc += &pool_document(&embed_document(vectors.provider(), doc)?)?;
                }
                Ok(Some(acc / ids.len() as f64))
            };
            let auth_docs: Vec<&str> = result
                .documents
                .iter()
                .filter(|d| d.doc_type.is_first_person() && d.author_id.as_deref() == Some(politician))
                .map(|d| d.id.as_str())
                .collect();
            let bg: Vec<&str> = result
                .documents
                .iter()
                .filter(|d| d.doc_type == DocType::Background)
                .map(|d| d.id.as_str())
                .collect();
            let ent_docs: Vec<&str> = match ref_entity {
                Some(e) => result
                    .documents
                    .iter()
                    .filter(|d| d.referenced_entities.contains(e))
                    .map(|d| d.id.as_str())
                    .collect(),
                None => Vec::new(),
            };
            let auth = mean_of(auth_docs)?.expect("author has discourse");
            let iss = mean_of(bg)?
                .ok_or_else(|| Error::Evaluation(format!("issue {issue} has no background")))?;
            let ent = mean_of(ent_docs)?;
            Ok(StanceEmbedding::new(auth, iss, ent))
        }
    }
}

/// Zero-shot stance: compares `n_stance` with the provider embeddings of the
/// two representative sentences.
#[allow(clippy::too_many_arguments)]
pub fn grade_paraphrase(
    source: StanceSource<'_>,
    corpus: &Corpus,
    provider: &dyn EmbeddingProvider,
    politician: &str,
    issue: &str,
    ref_entity: Option<&str>,
    pos_sentence: &str,
    neg_sentence: &str,
) -> Result<ParaphraseResult> {
    let mut vectors = DocumentVectors::new(provider);
    let stance = stance_embedding(
        source,
        corpus,
        &mut vectors,
        politician,
        issue,
        ref_entity,
        &BTreeSet::new(),
    )?;
    let pos = provider.embed_sentence(&tokenize(pos_sentence))?;
    let neg = provider.embed_sentence(&tokenize(neg_sentence))?;
    Ok(classify_stance(&stance.n_stance, &pos, &neg))
}
