//! Sentence embeddings behind a provider interface, and document pooling.
//!
//! Two providers ship with the crate: [`PrecomputedProvider`] reads rows from
//! a binary [`EmbeddingStore`], and [`HashEmbedder`] derives deterministic
//! pseudo-random vectors from token sequences for tests and toy runs.

mod hashed;
mod store;

use ndarray::{Array1, Array2, Axis};

use crate::corpus::{Document, ENTITY_MASK};
use crate::error::{Error, Result};
use crate::tensor::all_finite;

pub use hashed::{sentence_hash, test_embed, HashEmbedder};
pub use store::{EmbeddingStore, EmbeddingStoreWriter, INDEX_SUFFIX};

/// Embedding width of the pretrained sentence encoder.
pub const DEFAULT_DIM: usize = 768;

/// One row per sentence of a document.
#[derive(Clone, Debug, PartialEq)]
pub struct SentenceEmbeddingMatrix {
    pub doc_id: String,
    pub rows: Array2<f64>,
    /// Tokens per sentence, used to weight sentence rows when pooling.
    pub token_counts: Option<Vec<usize>>,
}

impl SentenceEmbeddingMatrix {
    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }
}

/// Contextual embedding of a single token occurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenOccurrenceEmbedding {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub vector: Array1<f64>,
}

pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;

    /// Sentence rows for a document. Masked documents (containing
    /// [`ENTITY_MASK`]) are embedded as their own variant.
    fn sentence_rows(&self, doc: &Document) -> Result<Array2<f64>>;

    /// Embedding of a free-standing sentence, e.g. a stance paraphrase.
    fn embed_sentence(&self, tokens: &[String]) -> Result<Array1<f64>>;

    /// Contextual embedding of one token occurrence in a document.
    fn embed_token(&self, doc: &Document, sentence: usize, token: usize) -> Result<Array1<f64>>;
}

/// Embeds a document sentence-wise and validates the provider output.
pub fn embed_document(
    provider: &dyn EmbeddingProvider,
    doc: &Document,
) -> Result<SentenceEmbeddingMatrix> {
    if doc.sentences.is_empty() {
        return Err(Error::Provider(format!("document {} has no sentences", doc.id)));
    }
    let rows = provider.sentence_rows(doc)?;
    if rows.nrows() != doc.sentences.len() {
        return Err(Error::Provider(format!(
            "document {}: {} rows for {} sentences",
            doc.id,
            rows.nrows(),
            doc.sentences.len()
        )));
    }
    if rows.ncols() != provider.dim() {
        return Err(Error::Provider(format!(
            "document {}: dimension {} != provider dimension {}",
            doc.id,
            rows.ncols(),
            provider.dim()
        )));
    }
    if !all_finite(rows.iter()) {
        return Err(Error::Provider(format!(
            "document {}: non-finite embedding values",
            doc.id
        )));
    }
    Ok(SentenceEmbeddingMatrix {
        doc_id: doc.id.clone(),
        rows,
        token_counts: Some(doc.sentences.iter().map(Vec::len).collect()),
    })
}

/// Document vector: token-count-weighted mean of sentence rows, which equals
/// the mean over all token embeddings when each row is a token mean. Falls
/// back to the plain row mean without counts (or when every count is zero).
pub fn pool_document(m: &SentenceEmbeddingMatrix) -> Result<Array1<f64>> {
    let n = m.rows.nrows();
    if n == 0 {
        return Err(Error::Provider(format!(
            "document {}: cannot pool zero sentences",
            m.doc_id
        )));
    }
    if let Some(counts) = &m.token_counts {
        if counts.len() != n {
            return Err(Error::Shape(format!(
                "document {}: {} token counts for {} rows",
                m.doc_id,
                counts.len(),
                n
            )));
        }
        let total: usize = counts.iter().sum();
        if total > 0 {
            let mut acc = Array1::zeros(m.rows.ncols());
            for (row, &c) in m.rows.outer_iter().zip(counts) {
                acc.scaled_add(c as f64, &row);
            }
            return Ok(acc / total as f64);
        }
    }
    Ok(m.rows.mean_axis(Axis(0)).expect("non-empty"))
}

/// Store key of a document's sentence rows (or of its masked variant).
pub fn document_key(doc: &Document) -> String {
    let masked = doc.sentences.iter().flatten().any(|t| t == ENTITY_MASK);
    if masked {
        format!("{}#masked", doc.id)
    } else {
        doc.id.clone()
    }
}

/// Store key of a free-standing sentence.
pub fn sentence_key(tokens: &[String]) -> String {
    format!("sentence:{}", tokens.join(" "))
}

/// Store key of the per-token rows of one sentence.
pub fn token_key(doc: &Document, sentence: usize) -> String {
    format!("tokens:{}:{sentence}", document_key(doc))
}

/// Provider backed by a precomputed [`EmbeddingStore`].
#[derive(Debug)]
pub struct PrecomputedProvider {
    store: EmbeddingStore,
}

impl PrecomputedProvider {
    pub fn new(store: EmbeddingStore) -> Self {
        PrecomputedProvider { store }
    }

    pub fn open(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Ok(Self::new(EmbeddingStore::open(path)?))
    }

    pub fn store(&self) -> &EmbeddingStore {
        &self.store
    }
}

impl EmbeddingProvider for PrecomputedProvider {
    fn dim(&self) -> usize {
        self.store.dim()
    }

    fn sentence_rows(&self, doc: &Document) -> Result<Array2<f64>> {
        self.store.get(&document_key(doc))
    }

    fn embed_sentence(&self, tokens: &[String]) -> Result<Array1<f64>> {
        let m = self.store.get(&sentence_key(tokens))?;
        if m.nrows() != 1 {
            return Err(Error::Provider(format!(
                "sentence record has {} rows",
                m.nrows()
            )));
        }
        Ok(m.row(0).to_owned())
    }

    fn embed_token(&self, doc: &Document, sentence: usize, token: usize) -> Result<Array1<f64>> {
        let m = self.store.get(&token_key(doc, sentence))?;
        if token >= m.nrows() {
            return Err(Error::Provider(format!(
                "token {token} out of range for {}",
                token_key(doc, sentence)
            )));
        }
        Ok(m.row(token).to_owned())
    }
}

/// Token-occurrence embedding with index validation.
pub fn embed_token_occurrence(
    provider: &dyn EmbeddingProvider,
    doc: &Document,
    sentence: usize,
    token: usize,
) -> Result<TokenOccurrenceEmbedding> {
    let in_range = doc
        .sentences
        .get(sentence)
        .is_some_and(|s| token < s.len());
    if !in_range {
        return Err(Error::Provider(format!(
            "document {}: token ({sentence}, {token}) out of range",
            doc.id
        )));
    }
    let vector = provider.embed_token(doc, sentence, token)?;
    if vector.len() != provider.dim() || !all_finite(vector.iter()) {
        return Err(Error::Provider(format!(
            "document {}: bad token embedding",
            doc.id
        )));
    }
    Ok(TokenOccurrenceEmbedding {
        doc_id: doc.id.clone(),
        sentence_index: sentence,
        token_index: token,
        vector,
    })
}
