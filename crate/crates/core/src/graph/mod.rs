//! In-memory property graph: ingestion, transforms, schema, entity index and
//! the pattern-matching executor.

mod exec;
mod index;
mod load;
mod schema;
mod transform;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use exec::{execute_query, ExecError, QueryResult};
pub use index::{build_entity_index, EntityIndex};
pub use load::{load_graph, save_graph_json, save_graph_tsv, GraphFormat};
pub use schema::{derive_schema, render_schema_text, GraphSchema, RelationTriple};
pub use transform::{apply_transforms, RenameRule, TransformConfig, Transformed};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub label: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, String>,
}

impl GraphNode {
    pub fn new(id: impl Into<String>, label: impl Into<String>, name: impl Into<String>) -> Self {
        Self { id: id.into(), label: label.into(), name: name.into(), properties: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphEdge {
    pub source: String,
    pub relation: String,
    pub target: String,
}

impl GraphEdge {
    pub fn new(source: impl Into<String>, relation: impl Into<String>, target: impl Into<String>) -> Self {
        Self { source: source.into(), relation: relation.into(), target: target.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Malformed { file: String, line: usize, message: String },
    #[error("{path}: invalid graph JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("edge{} references unknown node id '{id}'", line_suffix(*.line))]
    DanglingEndpoint { id: String, line: Option<usize> },
    #[error("duplicate node id '{id}'{}", line_suffix(*.line))]
    DuplicateNodeId { id: String, line: Option<usize> },
    #[error("node '{id}': {message}")]
    InvalidNode { id: String, message: String },
    #[error("invalid transform config: {0}")]
    Transform(String),
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" on line {l}")).unwrap_or_default()
}

/// Immutable graph. Edge endpoints are validated and duplicate triples
/// collapsed at construction.
#[derive(Debug, Clone)]
pub struct PropertyGraph {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    by_id: HashMap<String, usize>,
    /// (source index, target index) per edge.
    ends: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    by_label: HashMap<String, Vec<usize>>,
    by_name: HashMap<String, Vec<usize>>,
}

impl PartialEq for PropertyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for PropertyGraph {}

impl PropertyGraph {
    pub fn new(nodes: Vec<GraphNode>, edges: Vec<GraphEdge>) -> Result<Self, GraphError> {
        let lines = vec![None; edges.len()];
        Self::build(nodes, Vec::new(), edges, lines)
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    /// Like [`PropertyGraph::new`] with source line numbers for error messages.
    pub(crate) fn build(
        nodes: Vec<GraphNode>,
        node_lines: Vec<Option<usize>>,
        edges: Vec<GraphEdge>,
        edge_lines: Vec<Option<usize>>,
    ) -> Result<Self, GraphError> {
        let mut by_id = HashMap::with_capacity(nodes.len());
        let mut by_label: HashMap<String, Vec<usize>> = HashMap::new();
        let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            let line = node_lines.get(i).copied().flatten();
            if node.id.is_empty() {
                return Err(GraphError::InvalidNode { id: node.id.clone(), message: "empty id".into() });
            }
            if node.label.is_empty() {
                return Err(GraphError::InvalidNode { id: node.id.clone(), message: "empty label".into() });
            }
            if node.name.is_empty() {
                return Err(GraphError::InvalidNode { id: node.id.clone(), message: "empty name".into() });
            }
            if by_id.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNodeId { id: node.id.clone(), line });
            }
            by_label.entry(node.label.clone()).or_default().push(i);
            by_name.entry(node.name.clone()).or_default().push(i);
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut kept = Vec::with_capacity(edges.len());
        let mut ends = Vec::with_capacity(edges.len());
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (edge, line) in edges.into_iter().zip(edge_lines) {
            let lookup = |id: &str| {
                by_id.get(id).copied().ok_or_else(|| GraphError::DanglingEndpoint { id: id.to_string(), line })
            };
            let s = lookup(&edge.source)?;
            let t = lookup(&edge.target)?;
            if edge.relation.is_empty() {
                return Err(GraphError::Malformed {
                    file: "edges".into(),
                    line: line.unwrap_or(0),
                    message: "empty relation name".into(),
                });
            }
            if !seen.insert((s, edge.relation.clone(), t)) {
                continue;
            }
            let e = kept.len();
            outgoing[s].push(e);
            incoming[t].push(e);
            ends.push((s, t));
            kept.push(edge);
        }
        Ok(Self { nodes, edges: kept, by_id, ends, outgoing, incoming, by_label, by_name })
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_by_id(&self, id: &str) -> Option<&GraphNode> {
        self.by_id.get(id).map(|&i| &self.nodes[i])
    }

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub(crate) fn edge_ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub(crate) fn outgoing(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    pub(crate) fn incoming(&self, node: usize) -> &[usize] {
        &self.incoming[node]
    }

    pub(crate) fn nodes_with_label(&self, label: &str) -> &[usize] {
        self.by_label.get(label).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn nodes_with_name(&self, name: &str) -> &[usize] {
        self.by_name.get(name).map_or(&[], Vec::as_slice)
    }

    /// Label of an edge's source and target node.
    pub fn edge_labels(&self, e: usize) -> (&str, &str) {
        let (s, t) = self.ends[e];
        (&self.nodes[s].label, &self.nodes[t].label)
    }

    pub fn has_edge(&self, source_id: &str, relation: &str, target_id: &str) -> bool {
        let (Some(s), Some(t)) = (self.index_of(source_id), self.index_of(target_id)) else {
            return false;
        };
        self.outgoing[s].iter().any(|&e| self.ends[e].1 == t && self.edges[e].relation == relation)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// `nodes`: (id, label, name); `edges`: (source, relation, target).
    pub fn graph(nodes: &[(&str, &str, &str)], edges: &[(&str, &str, &str)]) -> PropertyGraph {
        PropertyGraph::new(
            nodes.iter().map(|(i, l, n)| GraphNode::new(*i, *l, *n)).collect(),
            edges.iter().map(|(s, r, t)| GraphEdge::new(*s, *r, *t)).collect(),
        )
        .unwrap()
    }
}
