use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::PropertyGraph;
use crate::ident::escape_identifier;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationTriple {
    pub source: String,
    pub relation: String,
    pub target: String,
}

impl RelationTriple {
    pub fn new(source: &str, relation: &str, target: &str) -> Self {
        Self { source: source.into(), relation: relation.into(), target: target.into() }
    }
}

/// Node labels and the `(source label, relation, target label)` triples that
/// occur in a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSchema {
    pub node_labels: BTreeSet<String>,
    pub relation_triples: BTreeSet<RelationTriple>,
    /// Same-label relations observed in both directions.
    pub self_bidirectional: BTreeSet<String>,
}

impl GraphSchema {
    pub fn has_label(&self, label: &str) -> bool {
        self.node_labels.contains(label)
    }

    pub fn has_triple(&self, source: &str, relation: &str, target: &str) -> bool {
        // BTreeSet<RelationTriple> can't be probed with borrowed parts, so scan;
        // schemas hold tens of triples.
        self.relation_triples.iter().any(|t| t.source == source && t.relation == relation && t.target == target)
    }

    pub fn has_relation(&self, relation: &str) -> bool {
        self.relation_triples.iter().any(|t| t.relation == relation)
    }

    /// `relation` leaves a node labelled `label`.
    pub fn has_source(&self, relation: &str, label: &str) -> bool {
        self.relation_triples.iter().any(|t| t.relation == relation && t.source == label)
    }

    /// `relation` enters a node labelled `label`.
    pub fn has_target(&self, relation: &str, label: &str) -> bool {
        self.relation_triples.iter().any(|t| t.relation == relation && t.target == label)
    }

    /// Relation names connecting `a` and `b` in either orientation.
    pub fn relations_between(&self, a: &str, b: &str) -> BTreeSet<&str> {
        self.relation_triples
            .iter()
            .filter(|t| (t.source == a && t.target == b) || (t.source == b && t.target == a))
            .map(|t| t.relation.as_str())
            .collect()
    }

    /// Relation names touching `label` at either end.
    pub fn relations_touching(&self, label: &str) -> BTreeSet<&str> {
        self.relation_triples
            .iter()
            .filter(|t| t.source == label || t.target == label)
            .map(|t| t.relation.as_str())
            .collect()
    }
}

pub fn derive_schema(graph: &PropertyGraph) -> GraphSchema {
    let mut schema = GraphSchema::default();
    for node in graph.nodes() {
        schema.node_labels.insert(node.label.clone());
    }
    let mut pairs = HashSet::new();
    for (e, edge) in graph.edges().iter().enumerate() {
        let (src, dst) = graph.edge_labels(e);
        schema.relation_triples.insert(RelationTriple::new(src, &edge.relation, dst));
        if src == dst {
            let (s, t) = graph.edge_ends(e);
            pairs.insert((s, edge.relation.as_str(), t));
            if pairs.contains(&(t, edge.relation.as_str(), s)) {
                schema.self_bidirectional.insert(edge.relation.clone());
            }
        }
    }
    schema
}

/// Text shown to the model: node labels with their properties, then one
/// `(:src)-[:rel]->(:dst)` line per triple. Both sections are sorted.
pub fn render_schema_text(schema: &GraphSchema) -> String {
    let mut out = String::from("Node properties are the following:\n");
    for label in &schema.node_labels {
        let _ = writeln!(out, "{} {{name: STRING}}", escape_identifier(label));
    }
    out.push_str("Relationship properties are the following:\n");
    out.push_str("The relationships are the following:\n");
    for t in &schema.relation_triples {
        let _ = writeln!(
            out,
            "(:{})-[:{}]->(:{})",
            escape_identifier(&t.source),
            escape_identifier(&t.relation),
            escape_identifier(&t.target)
        );
    }
    out
}
