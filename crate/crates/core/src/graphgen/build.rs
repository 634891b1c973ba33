use std::collections::{BTreeMap, BTreeSet};

use super::{DiscourseGraph, Node, NodeKind, QueryResult};
use crate::corpus::DocType;
use crate::error::Result;

/// Builds the discourse graph of a query result.
///
/// Bidirectional edges: author <-> its encyclopedia article, tweets, press
/// releases and perspectives; issue <-> background; issue <-> event;
/// event <-> news. One-way edges: event -> tweet, event -> press release,
/// issue -> perspective, referenced entity -> mentioning document.
///
/// Nodes are ordered authors, issues, events, documents, referenced
/// entities, each sorted by id, so the graph does not depend on the order of
/// `result.documents`.
pub fn build_graph(result: &QueryResult) -> Result<DiscourseGraph> {
    let authors: BTreeSet<&str> = result.entities.iter().map(String::as_str).collect();
    let issues: BTreeSet<&str> = result.issues.iter().map(String::as_str).collect();
    let events: BTreeSet<(&str, u32)> = result.events.iter().map(|(i, x)| (i.as_str(), *x)).collect();

    let mut docs: Vec<_> = result.documents.iter().collect();
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    docs.dedup_by(|a, b| a.id == b.id);

    let mut refs: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for d in &docs {
        for e in &d.referenced_entities {
            refs.entry(e.as_str()).or_default().push(d.id.clone());
        }
    }

    let mut nodes = Vec::new();
    for a in &authors {
        let authored = docs
            .iter()
            .filter(|d| d.doc_type.has_author() && d.author_id.as_deref() == Some(a))
            .map(|d| d.id.clone())
            .collect();
        nodes.push(Node {
            kind: NodeKind::Author(a.to_string()),
            docs: authored,
        });
    }
    for i in &issues {
        let background = docs
            .iter()
            .filter(|d| {
                d.doc_type == DocType::Background
                    && d.memberships.iter().any(|m| m.issue_id == *i)
            })
            .map(|d| d.id.clone())
            .collect();
        nodes.push(Node {
            kind: NodeKind::Issue(i.to_string()),
            docs: background,
        });
    }
    for (issue, index) in &events {
        let news = docs
            .iter()
            .filter(|d| {
                d.doc_type == DocType::News
                    && d.memberships
                        .iter()
                        .any(|m| m.issue_id == *issue && m.event_index == Some(*index))
            })
            .map(|d| d.id.clone())
            .collect();
        nodes.push(Node {
            kind: NodeKind::Event {
                issue: issue.to_string(),
                index: *index,
            },
            docs: news,
        });
    }
    for d in &docs {
        nodes.push(Node {
            kind: NodeKind::Document {
                id: d.id.clone(),
                doc_type: d.doc_type,
            },
            docs: vec![d.id.clone()],
        });
    }
    for (e, mentioning) in &refs {
        nodes.push(Node {
            kind: NodeKind::ReferencedEntity(e.to_string()),
            docs: mentioning.clone(),
        });
    }

    let mut g = DiscourseGraph::new(nodes, [])?;
    let idx = |g: &DiscourseGraph, kind: NodeKind| g.find(&kind).expect("node created above");

    for (issue, index) in &events {
        let ev = idx(&g, NodeKind::Event { issue: issue.to_string(), index: *index });
        if let Some(is) = g.find(&NodeKind::Issue(issue.to_string())) {
            g.add_edge(is, ev);
            g.add_edge(ev, is);
        }
    }

    for d in &docs {
        let dn = idx(
            &g,
            NodeKind::Document {
                id: d.id.clone(),
                doc_type: d.doc_type,
            },
        );
        if d.doc_type.has_author() {
            if let Some(a) = d.author_id.as_deref().filter(|a| authors.contains(a)) {
                let an = idx(&g, NodeKind::Author(a.to_string()));
                g.add_edge(an, dn);
                g.add_edge(dn, an);
            }
        }
        for m in &d.memberships {
            let issue_node = g.find(&NodeKind::Issue(m.issue_id.clone()));
            let event_node = m.event_index.and_then(|index| {
                g.find(&NodeKind::Event {
                    issue: m.issue_id.clone(),
                    index,
                })
            });
            match d.doc_type {
                DocType::Background => {
                    if let Some(is) = issue_node {
                        g.add_edge(is, dn);
                        g.add_edge(dn, is);
                    }
                }
                DocType::News => {
                    if let Some(ev) = event_node {
                        g.add_edge(ev, dn);
                        g.add_edge(dn, ev);
                    }
                }
                DocType::Tweet | DocType::PressRelease => {
                    if let Some(ev) = event_node {
                        g.add_edge(ev, dn);
                    }
                }
                DocType::Perspective => {
                    if let Some(is) = issue_node {
                        g.add_edge(is, dn);
                    }
                }
                DocType::Wikipedia => {}
            }
        }
        for e in &d.referenced_entities {
            let en = idx(&g, NodeKind::ReferencedEntity(e.clone()));
            g.add_edge(en, dn);
        }
    }
    Ok(g)
}
