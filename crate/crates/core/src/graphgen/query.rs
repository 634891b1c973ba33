use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocType, Document, Membership};
use crate::error::{Error, Result};

/// Entities, issues and the event indices of each issue to retrieve.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTriplet {
    pub entity_ids: Vec<String>,
    pub issue_ids: Vec<String>,
    pub events_per_issue: BTreeMap<String, Vec<u32>>,
}

impl QueryTriplet {
    /// One author on one issue, over every event of that issue.
    pub fn for_author_issue(corpus: &Corpus, author: &str, issue: &str) -> Self {
        let events = corpus.events(issue).iter().map(|e| e.index).collect();
        QueryTriplet {
            entity_ids: vec![author.to_string()],
            issue_ids: vec![issue.to_string()],
            events_per_issue: BTreeMap::from([(issue.to_string(), events)]),
        }
    }

    /// One author over several issues, all events each.
    pub fn for_author_issues<'a>(
        corpus: &Corpus,
        author: &str,
        issues: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let mut q = QueryTriplet {
            entity_ids: vec![author.to_string()],
            ..Default::default()
        };
        for issue in issues {
            q.issue_ids.push(issue.to_string());
            q.events_per_issue.insert(
                issue.to_string(),
                corpus.events(issue).iter().map(|e| e.index).collect(),
            );
        }
        q
    }
}

/// A retrieved document with its membership restricted to the queried slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetrievedDocument {
    pub id: String,
    pub doc_type: DocType,
    pub author_id: Option<String>,
    pub memberships: Vec<Membership>,
    pub referenced_entities: BTreeSet<String>,
}

impl RetrievedDocument {
    pub fn from_document(doc: &Document, memberships: Vec<Membership>) -> Self {
        RetrievedDocument {
            id: doc.id.clone(),
            doc_type: doc.doc_type,
            author_id: doc.author_id.clone(),
            memberships,
            referenced_entities: doc.referenced_entities.iter().flatten().cloned().collect(),
        }
    }
}

/// The corpus slice selected by a query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryResult {
    pub entities: Vec<String>,
    pub issues: Vec<String>,
    pub events: Vec<(String, u32)>,
    pub documents: Vec<RetrievedDocument>,
}

impl QueryResult {
    pub fn document(&self, id: &str) -> Option<&RetrievedDocument> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn count_by_type(&self) -> BTreeMap<DocType, usize> {
        let mut out = BTreeMap::new();
        for d in &self.documents {
            *out.entry(d.doc_type).or_insert(0) += 1;
        }
        out
    }
}

/// Retrieves news for each queried event, the encyclopedia article of each
/// entity, the background of each issue, each entity's perspectives on each
/// issue and each entity's tweets and press releases tied to queried events.
pub fn resolve_query(corpus: &Corpus, q: &QueryTriplet) -> Result<QueryResult> {
    let mut missing = Vec::new();
    for e in &q.entity_ids {
        if corpus.entity(e).is_none() {
            missing.push(format!("entity:{e}"));
        }
    }
    for i in &q.issue_ids {
        if corpus.issue(i).is_none() {
            missing.push(format!("issue:{i}"));
        }
    }
    for (issue, idxs) in &q.events_per_issue {
        if !q.issue_ids.contains(issue) {
            missing.push(format!("issue:{issue} (events given but issue not queried)"));
            continue;
        }
        for idx in idxs {
            if corpus.event(issue, *idx).is_none() {
                missing.push(format!("event:{issue}#{idx}"));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Resolution(missing));
    }

    let entities: BTreeSet<&str> = q.entity_ids.iter().map(String::as_str).collect();
    let issues: BTreeSet<&str> = q.issue_ids.iter().map(String::as_str).collect();
    let events: BTreeSet<(&str, u32)> = q
        .events_per_issue
        .iter()
        .flat_map(|(i, idxs)| idxs.iter().map(move |&x| (i.as_str(), x)))
        .collect();

    let in_issue = |m: &Membership| issues.contains(m.issue_id.as_str());
    let in_event = |m: &Membership| {
        m.event_index
            .is_some_and(|x| events.contains(&(m.issue_id.as_str(), x)))
    };

    let mut documents = Vec::new();
    for doc in corpus.documents() {
        let by_entity = doc
            .author_id
            .as_deref()
            .is_some_and(|a| entities.contains(a));
        let ms = corpus.memberships(&doc.id);
        let kept: Option<Vec<Membership>> = match doc.doc_type {
            DocType::Wikipedia if by_entity => Some(Vec::new()),
            DocType::Background => {
                let m: Vec<_> = ms.iter().filter(|m| in_issue(m)).cloned().collect();
                (!m.is_empty()).then_some(m)
            }
            DocType::Perspective if by_entity => {
                let m: Vec<_> = ms.iter().filter(|m| in_issue(m)).cloned().collect();
                (!m.is_empty()).then_some(m)
            }
            DocType::News => {
                let m: Vec<_> = ms.iter().filter(|m| in_event(m)).cloned().collect();
                (!m.is_empty()).then_some(m)
            }
            DocType::Tweet | DocType::PressRelease if by_entity => {
                let m: Vec<_> = ms.iter().filter(|m| in_event(m)).cloned().collect();
                (!m.is_empty()).then_some(m)
            }
            _ => None,
        };
        if let Some(m) = kept {
            documents.push(RetrievedDocument::from_document(doc, m));
        }
    }

    let mut entity_list: Vec<String> = entities.iter().map(|s| s.to_string()).collect();
    entity_list.dedup();
    Ok(QueryResult {
        entities: entity_list,
        issues: issues.iter().map(|s| s.to_string()).collect(),
        events: events.iter().map(|(i, x)| (i.to_string(), *x)).collect(),
        documents,
    })
}
