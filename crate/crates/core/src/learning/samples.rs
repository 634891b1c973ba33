use std::collections::BTreeSet;

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocType, Document};
use crate::encoder::DocumentMask;
use crate::error::{Error, Result};
use crate::graphgen::{trim_graph, DiscourseGraph, Node, NodeKind, NodeType, TrimConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Authorship,
    RefEntity,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::Authorship, Task::RefEntity];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Authorship => "authorship",
            Task::RefEntity => "ref_entity",
        }
    }
}

/// Source of an authorship negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeBatch {
    /// A news article node of the same graph.
    NewsArticle,
    /// The author's own first-person document on an issue outside the graph.
    SameAuthorOtherIssue,
    /// Another author's first-person document on an issue of the graph.
    SameIssueOtherAuthor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedDocument {
    pub doc_id: String,
    pub entity: String,
}

/// One binary link-prediction example with the graph it is scored on.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkSample {
    pub task: Task,
    pub graph: DiscourseGraph,
    pub subject_node: usize,
    pub object_node: usize,
    pub label: bool,
    pub negative_batch: Option<NegativeBatch>,
    pub masked: Option<MaskedDocument>,
}

impl LinkSample {
    pub fn document_mask(&self) -> DocumentMask<'_> {
        self.masked
            .as_ref()
            .map(|m| (m.doc_id.as_str(), m.entity.as_str()))
    }

    pub fn subject_id(&self) -> String {
        self.graph.node(self.subject_node).id()
    }

    pub fn object_doc_id(&self) -> &str {
        &self.graph.node(self.object_node).docs[0]
    }

    /// The object document as the model sees it, masked when applicable.
    pub fn object_document(&self, corpus: &Corpus) -> Result<Document> {
        let id = self.object_doc_id();
        let doc = corpus
            .document(id)
            .ok_or_else(|| Error::Graph(format!("sample document {id} not in corpus")))?;
        Ok(match &self.masked {
            Some(m) if m.doc_id == id => doc.masked(&m.entity),
            _ => doc.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    /// Authorship negatives per positive, split evenly over the three
    /// negative batches.
    pub negative_ratio: f64,
    /// Per-sample trimming; `None` keeps full graphs.
    pub trim: Option<TrimConfig>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            negative_ratio: 2.0 / 3.0,
            trim: Some(TrimConfig::default()),
        }
    }
}

fn event_of(g: &DiscourseGraph, doc_node: usize) -> Option<usize> {
    g.indices_of(NodeType::Event)
        .into_iter()
        .find(|&e| g.has_edge(e, doc_node))
}

/// Trims `g` around the object's event and re-locates subject and object.
fn finish<R: Rng>(
    g: DiscourseGraph,
    subject: usize,
    object: usize,
    extra_protected: &[usize],
    cfg: &SampleConfig,
    rng: &mut R,
) -> Result<(DiscourseGraph, usize, usize, Vec<usize>)> {
    let Some(trim) = &cfg.trim else {
        return Ok((g, subject, object, extra_protected.to_vec()));
    };
    let mut protected = vec![subject, object];
    protected.extend_from_slice(extra_protected);
    let ids: Vec<String> = protected.iter().map(|&i| g.node(i).id()).collect();
    let (t, _) = trim_graph(&g, event_of(&g, object), &protected, trim, rng)?;
    let find = |id: &String| t.node_index(id).expect("protected nodes survive trimming");
    let located: Vec<usize> = ids.iter().map(find).collect();
    Ok((t, located[0], located[1], located[2..].to_vec()))
}

/// Adds a corpus document to the graph if missing, with the edges its
/// present issue, event and referenced-entity nodes imply. Author edges are
/// never added.
fn ensure_document(g: &mut DiscourseGraph, corpus: &Corpus, doc: &Document) -> Result<usize> {
    if let Some(i) = g.document_index(&doc.id) {
        return Ok(i);
    }
    let dn = g.push_node(Node {
        kind: NodeKind::Document {
            id: doc.id.clone(),
            doc_type: doc.doc_type,
        },
        docs: vec![doc.id.clone()],
    })?;
    for m in corpus.memberships(&doc.id) {
        match doc.doc_type {
            DocType::Tweet | DocType::PressRelease => {
                if let Some(ev) = m.event_index.and_then(|index| {
                    g.find(&NodeKind::Event {
                        issue: m.issue_id.clone(),
                        index,
                    })
                }) {
                    g.add_edge(ev, dn);
                }
            }
            DocType::Perspective => {
                if let Some(is) = g.find(&NodeKind::Issue(m.issue_id.clone())) {
                    g.add_edge(is, dn);
                }
            }
            _ => {}
        }
    }
    for e in doc.referenced_entities.iter().flatten() {
        if let Some(en) = g.find(&NodeKind::ReferencedEntity(e.clone())) {
            g.add_edge(en, dn);
        }
    }
    Ok(dn)
}

fn split_budget(total: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|k| total / parts + usize::from(k < total % parts))
        .collect()
}

/// Authorship samples for `author_node`.
///
/// Positives: every document node authored by the entity, with both
/// author/document edges removed and the document dropped from the author's
/// payload unless it is the only one. Negatives, `round(negative_ratio *
/// positives)` in total split evenly over three batches and drawn without
/// replacement: news nodes of the graph; the author's first-person documents
/// on other issues; other authors' first-person documents on the graph's
/// issues.
pub fn make_authorship_samples<R: Rng>(
    corpus: &Corpus,
    graph: &DiscourseGraph,
    author_node: usize,
    cfg: &SampleConfig,
    rng: &mut R,
) -> Result<Vec<LinkSample>> {
    if author_node >= graph.len() {
        return Err(Error::Graph(format!("author node {author_node} out of range")));
    }
    let NodeKind::Author(author) = &graph.node(author_node).kind else {
        return Err(Error::Graph(format!(
            "node {} is not an author",
            graph.node(author_node).id()
        )));
    };
    let doc_of = |i: usize| -> Option<&Document> {
        match &graph.node(i).kind {
            NodeKind::Document { id, .. } => corpus.document(id),
            _ => None,
        }
    };
    let authored: Vec<usize> = (0..graph.len())
        .filter(|&i| {
            doc_of(i).is_some_and(|d| {
                d.doc_type.has_author() && d.author_id.as_deref() == Some(author.as_str())
            })
        })
        .collect();
    if authored.is_empty() {
        return Err(Error::Validation(format!(
            "author {author} has no documents in the graph"
        )));
    }

    let mut samples = Vec::new();
    for &d in &authored {
        let mut g = graph.clone();
        g.remove_edge(author_node, d);
        g.remove_edge(d, author_node);
        let doc_id = g.node(d).docs[0].clone();
        let payload = g.docs_mut(author_node);
        if payload.len() > 1 {
            payload.retain(|x| *x != doc_id);
        }
        let (g, s, o, _) = finish(g, author_node, d, &[], cfg, rng)?;
        samples.push(LinkSample {
            task: Task::Authorship,
            graph: g,
            subject_node: s,
            object_node: o,
            label: true,
            negative_batch: None,
            masked: None,
        });
    }

    let issues: BTreeSet<String> = graph
        .nodes()
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::Issue(i) => Some(i.clone()),
            _ => None,
        })
        .collect();
    let in_graph_issue =
        |id: &str| corpus.memberships(id).iter().any(|m| issues.contains(&m.issue_id));

    let news: Vec<String> = (0..graph.len())
        .filter_map(|i| doc_of(i).filter(|d| d.doc_type == DocType::News))
        .map(|d| d.id.clone())
        .collect();
    let mut own_other: Vec<String> = corpus
        .documents()
        .iter()
        .filter(|d| {
            d.doc_type.is_first_person()
                && d.author_id.as_deref() == Some(author.as_str())
                && !corpus.memberships(&d.id).is_empty()
                && !in_graph_issue(&d.id)
        })
        .map(|d| d.id.clone())
        .collect();
    own_other.sort();
    let mut others_same: Vec<String> = corpus
        .documents()
        .iter()
        .filter(|d| {
            d.doc_type.is_first_person()
                && d.author_id.as_deref().is_some_and(|a| a != author)
                && in_graph_issue(&d.id)
        })
        .map(|d| d.id.clone())
        .collect();
    others_same.sort();

    let budget = (cfg.negative_ratio * authored.len() as f64).round() as usize;
    let pools = [
        (NegativeBatch::NewsArticle, news),
        (NegativeBatch::SameAuthorOtherIssue, own_other),
        (NegativeBatch::SameIssueOtherAuthor, others_same),
    ];
    for ((batch, pool), want) in pools.into_iter().zip(split_budget(budget, 3)) {
        if pool.len() < want {
            warn!(
                "{author}: {} pool has {} documents, {want} requested",
                batch_name(batch),
                pool.len()
            );
        }
        let chosen: Vec<&String> = pool.choose_multiple(rng, want.min(pool.len())).collect();
        for id in chosen {
            let doc = corpus.document(id).expect("pool drawn from corpus");
            let mut g = graph.clone();
            let o = ensure_document(&mut g, corpus, doc)?;
            let (g, s, o, _) = finish(g, author_node, o, &[], cfg, rng)?;
            samples.push(LinkSample {
                task: Task::Authorship,
                graph: g,
                subject_node: s,
                object_node: o,
                label: false,
                negative_batch: Some(batch),
                masked: None,
            });
        }
    }
    Ok(samples)
}

fn batch_name(b: NegativeBatch) -> &'static str {
    match b {
        NegativeBatch::NewsArticle => "news_article",
        NegativeBatch::SameAuthorOtherIssue => "same_author_other_issue",
        NegativeBatch::SameIssueOtherAuthor => "same_issue_other_author",
    }
}

impl NegativeBatch {
    pub fn as_str(self) -> &'static str {
        batch_name(self)
    }
}

/// Referenced-entity samples: one positive and one negative per document
/// node that mentions an entity.
///
/// The document's most frequent entity is masked in every mention, its
/// entity-to-document edge is removed and the document leaves the entity's
/// payload. The negative pairs the same graph with a uniformly drawn entity
/// node the document does not mention. Documents are skipped when no such
/// entity exists or the masked entity would be left without documents.
pub fn make_refent_samples<R: Rng>(
    corpus: &Corpus,
    graph: &DiscourseGraph,
    cfg: &SampleConfig,
    rng: &mut R,
) -> Result<Vec<LinkSample>> {
    let entity_nodes = graph.indices_of(NodeType::ReferencedEntity);
    let mut samples = Vec::new();
    for d in graph.indices_of(NodeType::Document) {
        let doc_id = &graph.node(d).docs[0];
        let doc = corpus
            .document(doc_id)
            .ok_or_else(|| Error::Graph(format!("document {doc_id} not in corpus")))?;
        let Some(entity) = doc.most_frequent_entity() else {
            continue;
        };
        let Some(en) = graph.find(&NodeKind::ReferencedEntity(entity.to_string())) else {
            continue;
        };
        if graph.node(en).docs.len() < 2 {
            continue;
        }
        let candidates: Vec<usize> = entity_nodes
            .iter()
            .copied()
            .filter(|&x| match &graph.node(x).kind {
                NodeKind::ReferencedEntity(e) => !doc.mentions(e),
                _ => false,
            })
            .collect();
        let Some(&neg) = candidates.choose(rng) else {
            continue;
        };
        let mut g = graph.clone();
        g.remove_edge(en, d);
        g.docs_mut(en).retain(|x| x != doc_id);
        let (g, s, o, rest) = finish(g, en, d, &[neg], cfg, rng)?;
        let masked = MaskedDocument {
            doc_id: doc_id.clone(),
            entity: entity.to_string(),
        };
        samples.push(LinkSample {
            task: Task::RefEntity,
            graph: g.clone(),
            subject_node: s,
            object_node: o,
            label: true,
            negative_batch: None,
            masked: Some(masked.clone()),
        });
        samples.push(LinkSample {
            task: Task::RefEntity,
            graph: g,
            subject_node: rest[0],
            object_node: o,
            label: false,
            negative_batch: None,
            masked: Some(masked),
        });
    }
    Ok(samples)
}
