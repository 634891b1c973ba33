//! Query resolution and discourse-graph construction.
//!
//! A [`QueryTriplet`] selects a corpus slice ([`QueryResult`]); [`build_graph`]
//! turns the slice into a typed directed [`DiscourseGraph`]. An edge `u -> v`
//! means `u` is updated from `v` during composition, and every node carries
//! a self-loop in the attention mask.

mod build;
mod dump;
mod query;
mod trim;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use ndarray::Array2;

use crate::corpus::DocType;
use crate::error::{Error, Result};

pub use build::build_graph;
pub use dump::{adjacency_text, graph_dump};
pub use query::{resolve_query, QueryResult, QueryTriplet, RetrievedDocument};
pub use trim::{trim_graph, TrimConfig, TrimReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeType {
    AuthorEntity,
    ReferencedEntity,
    Issue,
    Event,
    Document,
}

impl NodeType {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeType::AuthorEntity => "author_entity",
            NodeType::ReferencedEntity => "referenced_entity",
            NodeType::Issue => "issue",
            NodeType::Event => "event",
            NodeType::Document => "document",
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Author(String),
    Issue(String),
    Event { issue: String, index: u32 },
    Document { id: String, doc_type: DocType },
    ReferencedEntity(String),
}

impl NodeKind {
    pub fn node_type(&self) -> NodeType {
        match self {
            NodeKind::Author(_) => NodeType::AuthorEntity,
            NodeKind::Issue(_) => NodeType::Issue,
            NodeKind::Event { .. } => NodeType::Event,
            NodeKind::Document { .. } => NodeType::Document,
            NodeKind::ReferencedEntity(_) => NodeType::ReferencedEntity,
        }
    }

    /// Unique node id, e.g. `author:alice`, `event:guns#3`, `doc:t17`.
    pub fn id(&self) -> String {
        match self {
            NodeKind::Author(a) => format!("author:{a}"),
            NodeKind::Issue(i) => format!("issue:{i}"),
            NodeKind::Event { issue, index } => format!("event:{issue}#{index}"),
            NodeKind::Document { id, .. } => format!("doc:{id}"),
            NodeKind::ReferencedEntity(e) => format!("ref:{e}"),
        }
    }

    pub fn doc_type(&self) -> Option<DocType> {
        match self {
            NodeKind::Document { doc_type, .. } => Some(*doc_type),
            _ => None,
        }
    }
}

/// A graph node and the documents its encoder input is built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub docs: Vec<String>,
}

impl Node {
    pub fn id(&self) -> String {
        self.kind.id()
    }

    pub fn node_type(&self) -> NodeType {
        self.kind.node_type()
    }
}

/// Typed directed graph over authors, issues, events, documents and
/// referenced entities. Self-loops are implicit: they are not stored in
/// `edges` but always present in the adjacency matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscourseGraph {
    nodes: Vec<Node>,
    edges: BTreeSet<(usize, usize)>,
    index: HashMap<String, usize>,
}

impl DiscourseGraph {
    pub fn new(nodes: Vec<Node>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id(), i).is_some() {
                return Err(Error::Graph(format!("duplicate node id {}", n.id())));
            }
            if let NodeKind::Document { id, .. } = &n.kind {
                if n.docs.len() != 1 || &n.docs[0] != id {
                    return Err(Error::Graph(format!(
                        "document node {} must carry exactly itself",
                        n.id()
                    )));
                }
            }
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= nodes.len() || v >= nodes.len() {
                return Err(Error::Graph(format!("edge ({u}, {v}) out of range")));
            }
            if u != v {
                set.insert((u, v));
            }
        }
        Ok(DiscourseGraph {
            nodes,
            edges: set,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn find(&self, kind: &NodeKind) -> Option<usize> {
        self.node_index(&kind.id())
    }

    /// Non-self-loop edges, ordered.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u == v || self.edges.contains(&(u, v))
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.len() && v < self.len(), "edge out of range");
        if u != v {
            self.edges.insert((u, v));
        }
    }

    /// Removes `u -> v`; returns whether it was present. Self-loops stay.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        self.edges.remove(&(u, v))
    }

    pub fn linked(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v)) || self.edges.contains(&(v, u))
    }

    /// Mutable access to a node's document payload.
    pub fn docs_mut(&mut self, i: usize) -> &mut Vec<String> {
        &mut self.nodes[i].docs
    }

    pub fn indices_of(&self, t: NodeType) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i].node_type() == t)
            .collect()
    }

    pub fn document_index(&self, doc_id: &str) -> Option<usize> {
        self.node_index(&format!("doc:{doc_id}"))
    }

    /// Dense 0/1 adjacency with ones on the diagonal.
    pub fn adjacency(&self) -> Array2<u8> {
        let n = self.len();
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = 1;
        }
        for &(u, v) in &self.edges {
            a[[u, v]] = 1;
        }
        a
    }

    /// Attention mask derived from the adjacency matrix.
    pub fn mask(&self) -> Array2<bool> {
        self.adjacency().mapv(|x| x == 1)
    }

    /// Keeps the flagged nodes, re-indexing them in order and dropping edges
    /// that lose an endpoint.
    pub fn retain_nodes(&self, keep: &[bool]) -> DiscourseGraph {
        assert_eq!(keep.len(), self.len());
        let mut remap = vec![usize::MAX; self.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if keep[i] {
                remap[i] = nodes.len();
                nodes.push(node.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|(u, v)| keep[*u] && keep[*v])
            .map(|&(u, v)| (remap[u], remap[v]));
        DiscourseGraph::new(nodes, edges).expect("subgraph of a valid graph is valid")
    }

    /// Appends a node and returns its index.
    pub fn push_node(&mut self, node: Node) -> Result<usize> {
        let id = node.id();
        if self.index.contains_key(&id) {
            return Err(Error::Graph(format!("duplicate node id {id}")));
        }
        let i = self.nodes.len();
        self.index.insert(id, i);
        self.nodes.push(node);
        Ok(i)
    }
}
