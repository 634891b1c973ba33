//! Document corpus: records, on-disk layout, validation and issue/event slicing.
//!
//! A corpus directory holds a `manifest.toml` naming the entity registry, the
//! issues (with their gold hashtags), optional event records and a list of
//! JSON-lines document files. Everything is validated on load and the
//! resulting [`Corpus`] is immutable.

mod events;
mod hashtags;
mod manifest;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use events::{burst_threshold, detect_issue_events, identify_events, BurstThreshold};
pub use hashtags::{classify_tweet_issue, default_gold_hashtags, hashtags, normalize_hashtag};
pub use manifest::{write_corpus, Manifest, MANIFEST_FILE};

/// Token that replaces masked entity mentions.
pub const ENTITY_MASK: &str = "<ENT>";

/// Longest allowed event span, `end - start`, in days.
pub const MAX_EVENT_SPAN_DAYS: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    Tweet,
    PressRelease,
    Perspective,
    News,
    Wikipedia,
    Background,
}

impl DocType {
    pub const ALL: [DocType; 6] = [
        DocType::Tweet,
        DocType::PressRelease,
        DocType::Perspective,
        DocType::News,
        DocType::Wikipedia,
        DocType::Background,
    ];

    /// Document types written by (or about) an author entity.
    pub fn has_author(self) -> bool {
        matches!(
            self,
            DocType::Tweet | DocType::PressRelease | DocType::Perspective | DocType::Wikipedia
        )
    }

    /// Document types that can belong to a news event.
    pub fn attaches_to_events(self) -> bool {
        matches!(self, DocType::Tweet | DocType::PressRelease | DocType::News)
    }

    /// First-person discourse of an author: tweets, press releases, perspectives.
    pub fn is_first_person(self) -> bool {
        matches!(
            self,
            DocType::Tweet | DocType::PressRelease | DocType::Perspective
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Tweet => "tweet",
            DocType::PressRelease => "press_release",
            DocType::Perspective => "perspective",
            DocType::News => "news",
            DocType::Wikipedia => "wikipedia",
            DocType::Background => "background",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DocType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DocType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown document type {s:?}")))
    }
}

/// One text unit with its precomputed annotations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub id: String,
    pub doc_type: DocType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issue_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_index: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    pub sentences: Vec<Vec<String>>,
    /// Canonical entity ids mentioned in each sentence. Mentions also appear
    /// verbatim as tokens in `sentences`.
    #[serde(default)]
    pub referenced_entities: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline: Option<String>,
    /// Part-of-speech tag per token (Penn tags; adjectives start with `JJ`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pos_tags: Vec<Vec<String>>,
}

impl Document {
    /// Mention counts per referenced entity.
    pub fn entity_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for id in self.referenced_entities.iter().flatten() {
            *counts.entry(id.as_str()).or_insert(0) += 1;
        }
        counts
    }

    pub fn mentions(&self, entity: &str) -> bool {
        self.referenced_entities
            .iter()
            .flatten()
            .any(|e| e == entity)
    }

    /// The entity mentioned most often; ties go to the smallest id.
    pub fn most_frequent_entity(&self) -> Option<&str> {
        // BTreeMap iterates ids ascending, so the first max wins ties.
        let mut best: Option<(&str, usize)> = None;
        for (id, count) in self.entity_counts() {
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((id, count));
            }
        }
        best.map(|(id, _)| id)
    }

    /// Copy of this document with every mention of `entity` replaced by
    /// [`ENTITY_MASK`] and the entity dropped from the annotations.
    pub fn masked(&self, entity: &str) -> Document {
        let mut doc = self.clone();
        for sentence in &mut doc.sentences {
            for token in sentence.iter_mut() {
                if token == entity {
                    *token = ENTITY_MASK.to_string();
                }
            }
        }
        for refs in &mut doc.referenced_entities {
            refs.retain(|e| e != entity);
        }
        doc
    }

    /// `(sentence, token)` positions tagged as adjectives.
    pub fn adjective_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, tags) in self.pos_tags.iter().enumerate() {
            for (t, tag) in tags.iter().enumerate() {
                if tag.starts_with("JJ") {
                    out.push((s, t));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Author,
    Referenced,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityRecord {
    pub id: String,
    pub name: String,
    pub kind: EntityKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssueRecord {
    pub id: String,
    pub name: String,
    pub background_doc: String,
    #[serde(default)]
    pub gold_hashtags: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub issue_id: String,
    pub index: u32,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    #[serde(default)]
    pub news_doc_ids: Vec<String>,
}

impl EventRecord {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start_date <= date && date <= self.end_date
    }
}

/// Membership of a document in an issue slice, optionally within one event.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Membership {
    pub issue_id: String,
    pub event_index: Option<u32>,
}

/// Where event records come from when a corpus is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventSource {
    /// Use the supplied records.
    Supplied,
    /// Regenerate from daily news counts with the given lockout.
    Detect { skip_days: u32 },
}

/// A validated, immutable document corpus.
#[derive(Debug)]
pub struct Corpus {
    documents: Vec<Document>,
    by_id: HashMap<String, usize>,
    entities: BTreeMap<String, EntityRecord>,
    issues: BTreeMap<String, IssueRecord>,
    events: BTreeMap<String, Vec<EventRecord>>,
    memberships: Vec<Vec<Membership>>,
    by_author: BTreeMap<String, Vec<usize>>,
}

/// Loads and validates a corpus from a directory containing `manifest.toml`
/// (or from the manifest file itself).
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    manifest::load(path.as_ref())
}

impl Corpus {
    /// Assembles a corpus from in-memory records, checking every invariant.
    pub fn from_parts(
        entities: Vec<EntityRecord>,
        issues: Vec<IssueRecord>,
        events: Vec<EventRecord>,
        documents: Vec<Document>,
        source: EventSource,
    ) -> Result<Corpus> {
        let mut entity_map = BTreeMap::new();
        for e in entities {
            if e.id.is_empty() {
                return Err(Error::schema("entity", "empty entity id"));
            }
            if entity_map.contains_key(&e.id) {
                return Err(Error::schema(
                    format!("entity {}", e.id),
                    "duplicate entity id",
                ));
            }
            entity_map.insert(e.id.clone(), e);
        }

        let mut issue_map = BTreeMap::new();
        for mut issue in issues {
            if issue_map.contains_key(&issue.id) {
                return Err(Error::schema(
                    format!("issue {}", issue.id),
                    "duplicate issue id",
                ));
            }
            issue.gold_hashtags = issue
                .gold_hashtags
                .iter()
                .map(|h| normalize_hashtag(h))
                .collect();
            issue_map.insert(issue.id.clone(), issue);
        }

        let mut documents = documents;
        let mut by_id = HashMap::with_capacity(documents.len());
        for (i, doc) in documents.iter_mut().enumerate() {
            if by_id.insert(doc.id.clone(), i).is_some() {
                return Err(Error::schema(
                    format!("document {}", doc.id),
                    "duplicate document id",
                ));
            }
            if doc.referenced_entities.is_empty() {
                doc.referenced_entities = vec![Vec::new(); doc.sentences.len()];
            }
            validate_document(doc, &entity_map, &issue_map)?;
        }

        for issue in issue_map.values() {
            let record = format!("issue {}", issue.id);
            match by_id.get(&issue.background_doc) {
                None => {
                    return Err(Error::integrity(
                        record,
                        format!("background document {} not found", issue.background_doc),
                    ))
                }
                Some(&i) if documents[i].doc_type != DocType::Background => {
                    return Err(Error::integrity(
                        record,
                        format!(
                            "background document {} has type {}",
                            issue.background_doc, documents[i].doc_type
                        ),
                    ))
                }
                Some(_) => {}
            }
        }

        let events = match source {
            EventSource::Supplied => events,
            EventSource::Detect { skip_days } => {
                let counts = news_daily_counts(&documents);
                identify_events(&counts, skip_days)?
            }
        };
        let mut event_map: BTreeMap<String, Vec<EventRecord>> = BTreeMap::new();
        for ev in events {
            if !issue_map.contains_key(&ev.issue_id) {
                return Err(Error::integrity(
                    format!("event {}#{}", ev.issue_id, ev.index),
                    format!("unknown issue {}", ev.issue_id),
                ));
            }
            event_map.entry(ev.issue_id.clone()).or_default().push(ev);
        }
        for (issue, evs) in event_map.iter_mut() {
            evs.sort_by_key(|e| (e.start_date, e.index));
            validate_issue_events(issue, evs)?;
        }

        // Explicit news assignments from supplied event records.
        let mut explicit_news: HashMap<&str, (String, u32)> = HashMap::new();
        for evs in event_map.values() {
            for ev in evs {
                for id in &ev.news_doc_ids {
                    let record = format!("event {}#{}", ev.issue_id, ev.index);
                    let Some(&i) = by_id.get(id) else {
                        return Err(Error::integrity(record, format!("unknown document {id}")));
                    };
                    let doc = &documents[i];
                    if doc.doc_type != DocType::News
                        || doc.issue_id.as_deref() != Some(ev.issue_id.as_str())
                    {
                        return Err(Error::integrity(
                            record,
                            format!("document {id} is not a news article of this issue"),
                        ));
                    }
                    explicit_news.insert(doc.id.as_str(), (ev.issue_id.clone(), ev.index));
                }
            }
        }

        let mut memberships = Vec::with_capacity(documents.len());
        for doc in &documents {
            let m = compute_memberships(doc, &issue_map, &event_map, &explicit_news)?;
            memberships.push(m);
        }

        for evs in event_map.values_mut() {
            for ev in evs.iter_mut() {
                ev.news_doc_ids.clear();
            }
        }
        for (i, doc) in documents.iter().enumerate() {
            if doc.doc_type != DocType::News {
                continue;
            }
            for m in &memberships[i] {
                if let Some(idx) = m.event_index {
                    if let Some(ev) = event_map
                        .get_mut(&m.issue_id)
                        .and_then(|evs| evs.iter_mut().find(|e| e.index == idx))
                    {
                        ev.news_doc_ids.push(doc.id.clone());
                    }
                }
            }
        }
        for evs in event_map.values_mut() {
            for ev in evs.iter_mut() {
                ev.news_doc_ids.sort();
            }
        }

        let mut by_author: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, doc) in documents.iter().enumerate() {
            if let Some(a) = &doc.author_id {
                by_author.entry(a.clone()).or_default().push(i);
            }
        }

        Ok(Corpus {
            documents,
            by_id,
            entities: entity_map,
            issues: issue_map,
            events: event_map,
            memberships,
            by_author,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| &self.documents[i])
    }

    pub fn entity(&self, id: &str) -> Option<&EntityRecord> {
        self.entities.get(id)
    }

    pub fn entities(&self) -> impl Iterator<Item = &EntityRecord> {
        self.entities.values()
    }

    /// Author entity ids, ascending.
    pub fn authors(&self) -> Vec<&str> {
        self.entities
            .values()
            .filter(|e| e.kind == EntityKind::Author)
            .map(|e| e.id.as_str())
            .collect()
    }

    pub fn issue(&self, id: &str) -> Option<&IssueRecord> {
        self.issues.get(id)
    }

    pub fn issues(&self) -> impl Iterator<Item = &IssueRecord> {
        self.issues.values()
    }

    /// Events of one issue, sorted by start date.
    pub fn events(&self, issue_id: &str) -> &[EventRecord] {
        self.events.get(issue_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn all_events(&self) -> impl Iterator<Item = &EventRecord> {
        self.events.values().flatten()
    }

    pub fn event(&self, issue_id: &str, index: u32) -> Option<&EventRecord> {
        self.events(issue_id).iter().find(|e| e.index == index)
    }

    /// Issue/event slices the document belongs to.
    pub fn memberships(&self, doc_id: &str) -> &[Membership] {
        self.by_id
            .get(doc_id)
            .map(|&i| self.memberships[i].as_slice())
            .unwrap_or(&[])
    }

    /// Documents attributed to an author, in corpus order.
    pub fn documents_by_author<'a>(&'a self, author: &str) -> impl Iterator<Item = &'a Document> {
        self.by_author
            .get(author)
            .into_iter()
            .flatten()
            .map(move |&i| &self.documents[i])
    }

    pub fn in_issue(&self, doc_id: &str, issue_id: &str) -> bool {
        self.memberships(doc_id)
            .iter()
            .any(|m| m.issue_id == issue_id)
    }

    pub fn count_by_type(&self) -> BTreeMap<DocType, usize> {
        let mut out = BTreeMap::new();
        for d in &self.documents {
            *out.entry(d.doc_type).or_insert(0) += 1;
        }
        out
    }

    /// Daily news-article counts per issue, the input to event detection.
    pub fn news_daily_counts(&self) -> BTreeMap<String, BTreeMap<NaiveDate, i64>> {
        news_daily_counts(&self.documents)
    }

    pub fn summary(&self) -> CorpusSummary {
        CorpusSummary {
            documents: self.documents.len(),
            author_entities: self
                .entities
                .values()
                .filter(|e| e.kind == EntityKind::Author)
                .count(),
            referenced_entities: self
                .entities
                .values()
                .filter(|e| e.kind == EntityKind::Referenced)
                .count(),
            issues: self.issues.len(),
            events: self.events.values().map(Vec::len).sum(),
            by_type: self.count_by_type(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSummary {
    pub documents: usize,
    pub author_entities: usize,
    pub referenced_entities: usize,
    pub issues: usize,
    pub events: usize,
    pub by_type: BTreeMap<DocType, usize>,
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "documents\t{}", self.documents)?;
        writeln!(f, "author_entities\t{}", self.author_entities)?;
        writeln!(f, "referenced_entities\t{}", self.referenced_entities)?;
        writeln!(f, "issues\t{}", self.issues)?;
        write!(f, "events\t{}", self.events)?;
        for (t, n) in &self.by_type {
            write!(f, "\n{t}\t{n}")?;
        }
        Ok(())
    }
}

fn news_daily_counts(documents: &[Document]) -> BTreeMap<String, BTreeMap<NaiveDate, i64>> {
    let mut out: BTreeMap<String, BTreeMap<NaiveDate, i64>> = BTreeMap::new();
    for d in documents {
        if d.doc_type != DocType::News {
            continue;
        }
        if let (Some(issue), Some(date)) = (&d.issue_id, d.date) {
            *out.entry(issue.clone()).or_default().entry(date).or_insert(0) += 1;
        }
    }
    out
}

fn validate_document(
    doc: &Document,
    entities: &BTreeMap<String, EntityRecord>,
    issues: &BTreeMap<String, IssueRecord>,
) -> Result<()> {
    let record = format!("document {}", doc.id);
    if doc.id.is_empty() {
        return Err(Error::schema("document", "empty document id"));
    }
    if doc.sentences.is_empty() {
        return Err(Error::schema(record, "document has no sentences"));
    }
    if doc.referenced_entities.len() != doc.sentences.len() {
        return Err(Error::schema(
            record,
            format!(
                "{} referenced-entity lists for {} sentences",
                doc.referenced_entities.len(),
                doc.sentences.len()
            ),
        ));
    }
    if !doc.pos_tags.is_empty() {
        let aligned = doc.pos_tags.len() == doc.sentences.len()
            && doc
                .pos_tags
                .iter()
                .zip(&doc.sentences)
                .all(|(tags, toks)| tags.len() == toks.len());
        if !aligned {
            return Err(Error::schema(record, "pos_tags not aligned with tokens"));
        }
    }

    match (&doc.author_id, doc.doc_type.has_author()) {
        (None, true) => {
            return Err(Error::integrity(
                record,
                format!("{} without author_id", doc.doc_type),
            ))
        }
        (Some(_), false) => {
            return Err(Error::schema(
                record,
                format!("{} must not carry author_id", doc.doc_type),
            ))
        }
        (Some(a), true) => match entities.get(a) {
            Some(e) if e.kind == EntityKind::Author => {}
            Some(_) => {
                return Err(Error::integrity(
                    record,
                    format!("author {a} is not an author entity"),
                ))
            }
            None => return Err(Error::integrity(record, format!("unknown author {a}"))),
        },
        (None, false) => {}
    }

    if doc.event_index.is_some() && !doc.doc_type.attaches_to_events() {
        return Err(Error::schema(
            record,
            format!("{} cannot carry event_index", doc.doc_type),
        ));
    }
    if doc.event_index.is_some() && doc.issue_id.is_none() {
        return Err(Error::schema(record, "event_index requires issue_id"));
    }
    match doc.doc_type {
        DocType::News | DocType::Perspective if doc.issue_id.is_none() => {
            return Err(Error::integrity(
                record,
                format!("{} without issue_id", doc.doc_type),
            ))
        }
        DocType::Wikipedia | DocType::Background if doc.issue_id.is_some() => {
            return Err(Error::schema(
                record,
                format!("{} must not carry issue_id", doc.doc_type),
            ))
        }
        _ => {}
    }
    if let Some(issue) = &doc.issue_id {
        if !issues.contains_key(issue) {
            return Err(Error::integrity(record, format!("unknown issue {issue}")));
        }
    }

    for id in doc.referenced_entities.iter().flatten() {
        if !entities.contains_key(id) {
            return Err(Error::integrity(
                record,
                format!("unknown referenced entity {id}"),
            ));
        }
    }
    Ok(())
}

fn validate_issue_events(issue: &str, events: &[EventRecord]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for ev in events {
        let record = format!("event {}#{}", issue, ev.index);
        if !seen.insert(ev.index) {
            return Err(Error::schema(record, "duplicate event index"));
        }
        if ev.end_date < ev.start_date {
            return Err(Error::schema(record, "end_date precedes start_date"));
        }
        if (ev.end_date - ev.start_date).num_days() > MAX_EVENT_SPAN_DAYS {
            return Err(Error::schema(
                record,
                format!("event spans more than {MAX_EVENT_SPAN_DAYS} days"),
            ));
        }
    }
    for pair in events.windows(2) {
        if pair[1].start_date <= pair[0].end_date {
            return Err(Error::schema(
                format!("event {}#{}", issue, pair[1].index),
                format!("overlaps event {}#{}", issue, pair[0].index),
            ));
        }
    }
    Ok(())
}

fn compute_memberships(
    doc: &Document,
    issues: &BTreeMap<String, IssueRecord>,
    events: &BTreeMap<String, Vec<EventRecord>>,
    explicit_news: &HashMap<&str, (String, u32)>,
) -> Result<Vec<Membership>> {
    let record = || format!("document {}", doc.id);
    let event_by_date = |issue: &str| -> Option<u32> {
        let date = doc.date?;
        events
            .get(issue)?
            .iter()
            .find(|e| e.contains(date))
            .map(|e| e.index)
    };

    let mut out = Vec::new();
    match doc.doc_type {
        DocType::Wikipedia => {}
        DocType::Background => {
            for issue in issues.values().filter(|i| i.background_doc == doc.id) {
                out.push(Membership {
                    issue_id: issue.id.clone(),
                    event_index: None,
                });
            }
        }
        DocType::Perspective => out.push(Membership {
            issue_id: doc.issue_id.clone().unwrap_or_default(),
            event_index: None,
        }),
        DocType::News | DocType::PressRelease | DocType::Tweet => {
            let issue_ids: Vec<String> = match (&doc.issue_id, doc.doc_type) {
                (Some(i), _) => vec![i.clone()],
                (None, DocType::Tweet) => classify_tweet_issue(doc, issues.values())?,
                (None, _) => Vec::new(),
            };
            for issue in issue_ids {
                let event_index = if let Some(idx) = doc.event_index {
                    let exists = events
                        .get(&issue)
                        .is_some_and(|evs| evs.iter().any(|e| e.index == idx));
                    if !exists {
                        return Err(Error::integrity(
                            record(),
                            format!("unknown event {issue}#{idx}"),
                        ));
                    }
                    Some(idx)
                } else if let Some((_, idx)) = explicit_news.get(doc.id.as_str()) {
                    Some(*idx)
                } else {
                    event_by_date(&issue)
                };
                out.push(Membership {
                    issue_id: issue,
                    event_index,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn doc(id: &str, t: DocType) -> Document {
        Document {
            id: id.into(),
            doc_type: t,
            author_id: None,
            issue_id: None,
            event_index: None,
            date: None,
            sentences: vec![toks("hello world")],
            referenced_entities: vec![],
            headline: None,
            pos_tags: vec![],
        }
    }

    fn base() -> (Vec<EntityRecord>, Vec<IssueRecord>) {
        (
            vec![
                EntityRecord {
                    id: "alice".into(),
                    name: "Alice".into(),
                    kind: EntityKind::Author,
                },
                EntityRecord {
                    id: "NRA".into(),
                    name: "NRA".into(),
                    kind: EntityKind::Referenced,
                },
            ],
            vec![IssueRecord {
                id: "guns".into(),
                name: "Guns".into(),
                background_doc: "bg".into(),
                gold_hashtags: ["#NRA".to_string()].into(),
            }],
        )
    }

    #[test]
    fn empty_corpus_is_valid() {
        let c = Corpus::from_parts(vec![], vec![], vec![], vec![], EventSource::Supplied).unwrap();
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn tweet_without_author_is_integrity_error() {
        let (e, i) = base();
        let docs = vec![doc("bg", DocType::Background), doc("t1", DocType::Tweet)];
        let err = Corpus::from_parts(e, i, vec![], docs, EventSource::Supplied).unwrap_err();
        assert!(matches!(err, Error::Integrity { ref record, .. } if record.contains("t1")));
    }

    #[test]
    fn news_with_author_is_schema_error() {
        let (e, i) = base();
        let mut n = doc("n1", DocType::News);
        n.issue_id = Some("guns".into());
        n.author_id = Some("alice".into());
        let err = Corpus::from_parts(
            e,
            i,
            vec![],
            vec![doc("bg", DocType::Background), n],
            EventSource::Supplied,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn dangling_referenced_entity_is_rejected() {
        let (e, i) = base();
        let mut w = doc("w", DocType::Wikipedia);
        w.author_id = Some("alice".into());
        w.referenced_entities = vec![vec!["nobody".into()]];
        let err = Corpus::from_parts(
            e,
            i,
            vec![],
            vec![doc("bg", DocType::Background), w],
            EventSource::Supplied,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integrity { .. }));
    }

    #[test]
    fn background_must_exist() {
        let (e, i) = base();
        let err = Corpus::from_parts(e, i, vec![], vec![], EventSource::Supplied).unwrap_err();
        assert!(matches!(err, Error::Integrity { .. }));
    }

    #[test]
    fn overlapping_events_rejected() {
        let (e, i) = base();
        let d = |s: &str| s.parse::<NaiveDate>().unwrap();
        let evs = vec![
            EventRecord {
                issue_id: "guns".into(),
                index: 0,
                start_date: d("2020-01-01"),
                end_date: d("2020-01-05"),
                news_doc_ids: vec![],
            },
            EventRecord {
                issue_id: "guns".into(),
                index: 1,
                start_date: d("2020-01-05"),
                end_date: d("2020-01-07"),
                news_doc_ids: vec![],
            },
        ];
        let err = Corpus::from_parts(
            e,
            i,
            evs,
            vec![doc("bg", DocType::Background)],
            EventSource::Supplied,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn tweets_are_sliced_by_hashtag_and_date() {
        let (e, i) = base();
        let d = |s: &str| s.parse::<NaiveDate>().unwrap();
        let ev = EventRecord {
            issue_id: "guns".into(),
            index: 0,
            start_date: d("2020-01-01"),
            end_date: d("2020-01-05"),
            news_doc_ids: vec![],
        };
        let mut t = doc("t1", DocType::Tweet);
        t.author_id = Some("alice".into());
        t.date = Some(d("2020-01-03"));
        t.sentences = vec![toks("support the #nra today")];
        let mut n = doc("n1", DocType::News);
        n.issue_id = Some("guns".into());
        n.date = Some(d("2020-01-02"));
        let c = Corpus::from_parts(
            e,
            i,
            vec![ev],
            vec![doc("bg", DocType::Background), t, n],
            EventSource::Supplied,
        )
        .unwrap();
        assert_eq!(
            c.memberships("t1"),
            &[Membership {
                issue_id: "guns".into(),
                event_index: Some(0)
            }]
        );
        assert_eq!(c.events("guns")[0].news_doc_ids, vec!["n1".to_string()]);
        assert!(c.in_issue("bg", "guns"));
    }

    #[test]
    fn most_frequent_entity_breaks_ties_by_id() {
        let mut d = doc("x", DocType::News);
        d.sentences = vec![toks("Y X"), toks("X Y")];
        d.referenced_entities = vec![vec!["Y".into(), "X".into()], vec!["X".into(), "Y".into()]];
        assert_eq!(d.most_frequent_entity(), Some("X"));
        d.referenced_entities[1].push("Y".into());
        assert_eq!(d.most_frequent_entity(), Some("Y"));
    }

    #[test]
    fn masking_replaces_every_mention() {
        let mut d = doc("x", DocType::News);
        d.sentences = vec![toks("X said X"), toks("then X left")];
        d.referenced_entities = vec![vec!["X".into(), "X".into()], vec!["X".into()]];
        let m = d.masked("X");
        assert!(m.sentences.iter().flatten().all(|t| t != "X"));
        assert_eq!(
            m.sentences.iter().flatten().filter(|t| *t == ENTITY_MASK).count(),
            3
        );
        assert!(!m.mentions("X"));
    }
}
