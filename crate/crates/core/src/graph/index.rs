use std::collections::{BTreeMap, BTreeSet};

use super::PropertyGraph;

/// Exact, case-sensitive name → labels lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityIndex {
    labels_by_name: BTreeMap<String, BTreeSet<String>>,
}

static NO_LABELS: BTreeSet<String> = BTreeSet::new();

impl EntityIndex {
    /// Labels under which a node named `name` exists; empty when unknown.
    pub fn lookup(&self, name: &str) -> &BTreeSet<String> {
        self.labels_by_name.get(name).unwrap_or(&NO_LABELS)
    }

    pub fn contains(&self, name: &str, label: &str) -> bool {
        self.lookup(name).contains(label)
    }

    pub fn len(&self) -> usize {
        self.labels_by_name.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels_by_name.is_empty()
    }
}

pub fn build_entity_index(graph: &PropertyGraph) -> EntityIndex {
    let mut labels_by_name: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for node in graph.nodes() {
        labels_by_name.entry(node.name.clone()).or_default().insert(node.label.clone());
    }
    EntityIndex { labels_by_name }
}
