use std::path::Path;

use log::warn;
use ndarray::Array2;

use crate::corpus::Corpus;
use crate::embeddings::{EmbeddingProvider, EmbeddingStoreWriter};
use crate::encoder::DocumentVectors;
use crate::error::{Error, Result};
use crate::graphgen::{build_graph, resolve_query, NodeKind, QueryTriplet};
use crate::learning::Model;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExportReport {
    pub written: Vec<String>,
    pub skipped: Vec<String>,
}

/// Composed author embedding from all of the author's issues.
pub fn legislator_embedding(
    model: &Model,
    corpus: &Corpus,
    vectors: &mut DocumentVectors<'_>,
    politician: &str,
) -> Result<Option<ndarray::Array1<f64>>> {
    let issues: Vec<String> = corpus.issues().map(|i| i.id.clone()).collect();
    let q = QueryTriplet::for_author_issues(corpus, politician, issues.iter().map(String::as_str));
    let result = resolve_query(corpus, &q)?;
    let has_discourse = result
        .documents
        .iter()
        .any(|d| d.doc_type.is_first_person() && d.author_id.as_deref() == Some(politician));
    if !has_discourse {
        return Ok(None);
    }
    let graph = build_graph(&result)?;
    let (_, composed) = model.embed_graph(&graph, corpus, vectors, None)?;
    let a = graph
        .find(&NodeKind::Author(politician.into()))
        .ok_or_else(|| Error::Evaluation(format!("no node for {politician}")))?;
    Ok(Some(composed.u.row(a).to_owned()))
}

/// Writes one `1 x d_model` record per politician, keyed by id and sorted,
/// in the embedding-store format. Politicians without first-person
/// discourse are skipped.
pub fn export_legislator_embeddings(
    model: &Model,
    corpus: &Corpus,
    provider: &dyn EmbeddingProvider,
    politicians: &[String],
    path: impl AsRef<Path>,
) -> Result<ExportReport> {
    let mut ids: Vec<&String> = politicians.iter().collect();
    ids.sort();
    ids.dedup();
    let mut vectors = DocumentVectors::new(provider);
    let mut writer = EmbeddingStoreWriter::create(path)?;
    let mut report = ExportReport::default();
    for id in ids {
        if corpus.entity(id).is_none() {
            return Err(Error::Resolution(vec![format!("entity:{id}")]));
        }
        match legislator_embedding(model, corpus, &mut vectors, id)? {
            Some(v) => {
                let row = v.insert_axis(ndarray::Axis(0));
                let row: Array2<f64> = row;
                writer.append(id, row.view())?;
                report.written.push(id.clone());
            }
            None => {
                warn!("{id} has no first-person discourse; skipped");
                report.skipped.push(id.clone());
            }
        }
    }
    writer.finish()?;
    Ok(report)
}
