//! Seeded generator for the shipped desk-scale fixture: a small
//! multiple-sclerosis knowledge graph in upstream (bidirectional, raw
//! display name) form, the transform config that normalizes it, and a
//! 50-question benchmark whose answers come from the executor.

mod catalogue;
mod mutate;
mod questions;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::benchmark::BenchmarkItem;
use crate::graph::{
    apply_transforms, save_graph_tsv, GraphEdge, GraphError, GraphNode, PropertyGraph, RenameRule, TransformConfig,
};

use catalogue::{ANCHORS, LABELS, RELATIONS};
pub use mutate::{
    as_llm_reply, mutate_query, mutate_with_fallback, oracle_reply, record_oracle_transcripts, DefectPlan, Mutation,
};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const QUESTIONS_PER_STRUCTURE: usize = 10;

#[derive(Debug, Clone)]
pub struct Fixture {
    /// Upstream form: every fact stored in both directions under its
    /// original display name.
    pub raw_graph: PropertyGraph,
    pub transforms: TransformConfig,
    /// `raw_graph` after `transforms`.
    pub graph: PropertyGraph,
    pub items: Vec<BenchmarkItem>,
}

/// The rename table plus direction normalization used for the fixture and
/// for upstream exports of the same shape.
pub fn fixture_transforms() -> TransformConfig {
    let mut cfg = TransformConfig { drop_reverse_duplicates: true, ..Default::default() };
    for spec in RELATIONS {
        if let Some(to) = spec.renamed {
            let mut rule = RenameRule::between(spec.display, to, spec.x, spec.y);
            rule.note = Some(spec.relation.to_string());
            cfg.relation_renames.push(rule);
        }
        if spec.is_self() {
            cfg.bidirectional_self_relations.insert(spec.name().to_string());
        }
    }
    cfg
}

fn raw_graph(seed: u64) -> PropertyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::new();
    let mut id_of: HashMap<&str, String> = HashMap::new();
    let mut by_label: HashMap<&str, Vec<String>> = HashMap::new();
    for spec in LABELS {
        for (i, name) in spec.names.iter().enumerate() {
            let id = format!("{}:{:04}", spec.id_prefix, i + 1);
            nodes.push(GraphNode::new(id.clone(), spec.label, *name));
            id_of.insert(name, id.clone());
            by_label.entry(spec.label).or_default().push(id);
        }
    }

    let mut facts: Vec<(String, &str, String)> = Vec::new();
    let mut seen: BTreeSet<(String, &str, String)> = BTreeSet::new();
    let mut push = |x: String, display: &'static str, y: String, facts: &mut Vec<_>| {
        if x != y && seen.insert((x.clone(), display, y.clone())) && !seen.contains(&(y.clone(), display, x.clone())) {
            facts.push((x, display, y));
        }
    };
    for spec in RELATIONS {
        for (x, relation, display, y) in ANCHORS {
            if *relation == spec.relation && *display == spec.display {
                push(id_of[x].clone(), spec.display, id_of[y].clone(), &mut facts);
            }
        }
        let (xs, ys) = (&by_label[spec.x], &by_label[spec.y]);
        for _ in 0..spec.count {
            let x = xs[rng.random_range(0..xs.len())].clone();
            let y = ys[rng.random_range(0..ys.len())].clone();
            push(x, spec.display, y, &mut facts);
        }
    }

    let mut edges = Vec::with_capacity(facts.len() * 2);
    for (x, display, y) in facts {
        edges.push(GraphEdge::new(x.clone(), display, y.clone()));
        edges.push(GraphEdge::new(y, display, x));
    }
    PropertyGraph::new(nodes, edges).expect("fixture ids are consistent")
}

pub fn generate_fixture(seed: u64) -> Fixture {
    let raw_graph = raw_graph(seed);
    let transforms = fixture_transforms();
    let out = apply_transforms(&raw_graph, &transforms).expect("fixture transforms are valid");
    debug_assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    let items = questions::generate_items(&out.graph, seed);
    Fixture { raw_graph, transforms, graph: out.graph, items }
}

/// Writes `graph/nodes.tsv`, `graph/edges.tsv`, `transforms.json` and
/// `benchmark.json` under `dir`.
pub fn write_fixture(fixture: &Fixture, dir: &Path) -> Result<(), GraphError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GraphError::Io { path, source }
    };
    save_graph_tsv(&fixture.raw_graph, &dir.join("graph"))?;
    let transforms = serde_json::to_string_pretty(&fixture.transforms).expect("config serializes") + "\n";
    let path = dir.join("transforms.json");
    std::fs::write(&path, transforms).map_err(io(&path))?;
    let items = serde_json::to_string_pretty(&fixture.items).expect("items serialize") + "\n";
    let path = dir.join("benchmark.json");
    std::fs::write(&path, items).map_err(io(&path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::derive_schema;

    #[test]
    fn labels_and_names() {
        let f = generate_fixture(DEFAULT_SEED);
        let labels: BTreeSet<_> = f.graph.nodes().iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels.len(), 10);
        let names: BTreeSet<_> = f.graph.nodes().iter().map(|n| n.name.as_str()).collect();
        assert_eq!(names.len(), f.graph.node_count(), "names are unique across labels");
        assert!((150..=250).contains(&f.graph.node_count()));
    }

    #[test]
    fn transformed_graph_is_one_directional_except_self_relations() {
        let f = generate_fixture(DEFAULT_SEED);
        let schema = derive_schema(&f.graph);
        for t in &schema.relation_triples {
            if t.source != t.target {
                assert!(!schema.has_triple(&t.target, &t.relation, &t.source), "{t:?}");
            }
        }
        assert!(schema.has_triple("drug", "contraindication", "disease"));
        assert!(schema.self_bidirectional.contains("protein-protein interaction"));
        for e in f.graph.edges() {
            let (s, t) = (f.graph.node_by_id(&e.source).unwrap(), f.graph.node_by_id(&e.target).unwrap());
            if s.label == t.label {
                assert!(f.graph.has_edge(&e.target, &e.relation, &e.source));
            }
        }
        // every raw fact survives in exactly one orientation (or both, for self relations)
        assert_eq!(f.raw_graph.edge_count(), 2 * (f.graph.edge_count() - self_edges(&f.graph) / 2));
    }

    fn self_edges(g: &PropertyGraph) -> usize {
        g.edges()
            .iter()
            .filter(|e| g.node_by_id(&e.source).unwrap().label == g.node_by_id(&e.target).unwrap().label)
            .count()
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_fixture(7);
        let b = generate_fixture(7);
        assert_eq!(a.raw_graph, b.raw_graph);
        assert_eq!(a.items, b.items);
    }
}
