//! Small random graphs, queries over their vocabulary, and a brute-force
//! evaluator that tries every assignment of graph nodes to query slots.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use graphqa_core::cypher::{CypherQuery, Direction};
use graphqa_core::graph::{GraphEdge, GraphNode, PropertyGraph};

use crate::ast::{random_query, Vocabulary};

pub const LABELS: [&str; 3] = ["A", "B", "C"];
pub const RELATIONS: [&str; 3] = ["r", "s", "t"];
/// Fewer names than nodes, so name filters often match several nodes.
pub const NAMES: [&str; 8] = ["n0", "n1", "n2", "n3", "n4", "n5", "n6", "n7"];

/// At most `max_nodes` nodes and `max_edges` edge draws (self loops and
/// repeated draws included; the graph drops exact duplicates).
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> PropertyGraph {
    let n = rng.random_range(1..=max_nodes);
    let nodes: Vec<GraphNode> = (0..n)
        .map(|i| {
            GraphNode::new(
                format!("v{i}"),
                LABELS[rng.random_range(0..LABELS.len())],
                NAMES[rng.random_range(0..NAMES.len())],
            )
        })
        .collect();
    let m = rng.random_range(0..=max_edges);
    let edges = (0..m)
        .map(|_| {
            GraphEdge::new(
                format!("v{}", rng.random_range(0..n)),
                RELATIONS[rng.random_range(0..RELATIONS.len())],
                format!("v{}", rng.random_range(0..n)),
            )
        })
        .collect();
    PropertyGraph::new(nodes, edges).expect("generated ids are consistent")
}

/// The vocabulary of [`random_graph`], plus one label and one relation that
/// never occur. Sparse labels and names keep deep structures answerable.
pub fn graph_vocabulary() -> Vocabulary {
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut labels = s(&LABELS);
    labels.push("Missing".into());
    let mut relations = s(&RELATIONS);
    relations.push("missing".into());
    Vocabulary {
        labels,
        relations,
        names: s(&NAMES),
        variables: s(&["a", "b", "c", "d", "e", "f"]),
        label_rate: 0.3,
        name_rate: 0.15,
    }
}

pub fn random_graph_query<R: Rng>(rng: &mut R, structure: u8) -> CypherQuery {
    random_query(rng, structure, &graph_vocabulary())
}

struct Slot {
    labels: Vec<String>,
    names: Vec<String>,
}

/// Every row of `query` over `graph`, sorted, with duplicates unless the
/// query is DISTINCT. `None` when a return variable is not bound.
///
/// Semantics: each variable is one slot, each anonymous node its own slot.
/// A binding maps slots to nodes such that labels and names hold and every
/// relationship has a matching edge; within one path no edge is used twice.
pub fn brute_force(graph: &PropertyGraph, query: &CypherQuery) -> Option<Vec<Vec<String>>> {
    let mut slots: Vec<Slot> = Vec::new();
    let mut by_var: HashMap<String, usize> = HashMap::new();
    // (path, left slot, relation, direction, right slot)
    let mut rels: Vec<(usize, usize, String, Direction, usize)> = Vec::new();
    for (p, path) in query.patterns.iter().enumerate() {
        let mut occ = Vec::new();
        for node in path.nodes() {
            let slot = match &node.variable {
                Some(v) if by_var.contains_key(v) => by_var[v],
                other => {
                    slots.push(Slot { labels: Vec::new(), names: Vec::new() });
                    if let Some(v) = other {
                        by_var.insert(v.clone(), slots.len() - 1);
                    }
                    slots.len() - 1
                }
            };
            slots[slot].labels.extend(node.label.clone());
            slots[slot].names.extend(node.name.clone());
            occ.push(slot);
        }
        for (i, (rel, _)) in path.hops.iter().enumerate() {
            rels.push((p, occ[i], rel.relation.clone(), rel.direction, occ[i + 1]));
        }
    }
    let ret: Vec<usize> = query.return_items.iter().map(|i| by_var.get(&i.variable).copied()).collect::<Option<_>>()?;

    let nodes = graph.nodes();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let edges: HashSet<(usize, &str, usize)> = graph
        .edges()
        .iter()
        .map(|e| (index[e.source.as_str()], e.relation.as_str(), index[e.target.as_str()]))
        .collect();
    // unary constraints only narrow the domain of each slot
    let domains: Vec<Vec<usize>> = slots
        .iter()
        .map(|slot| {
            (0..nodes.len())
                .filter(|&n| {
                    slot.labels.iter().all(|l| *l == nodes[n].label) && slot.names.iter().all(|m| *m == nodes[n].name)
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    if domains.iter().any(Vec::is_empty) {
        return Some(rows);
    }
    let mut odometer = vec![0usize; slots.len()];
    'outer: loop {
        let assignment: Vec<usize> = odometer.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
        let mut used: HashSet<(usize, usize, &str, usize)> = HashSet::new();
        let ok = rels.iter().all(|(p, l, rel, dir, r)| {
            let (s, t) = match dir {
                Direction::LeftToRight => (assignment[*l], assignment[*r]),
                Direction::RightToLeft => (assignment[*r], assignment[*l]),
            };
            edges.contains(&(s, rel.as_str(), t)) && used.insert((*p, s, rel.as_str(), t))
        });
        if ok {
            rows.push(
                query
                    .return_items
                    .iter()
                    .zip(&ret)
                    .map(|(item, &slot)| {
                        let node = &nodes[assignment[slot]];
                        match item.property.as_deref() {
                            Some("name") => node.name.clone(),
                            Some(p) => node.properties.get(p).cloned().unwrap_or_else(|| "null".into()),
                            None => format!("(:{} {{name:\"{}\"}})", node.label, node.name),
                        }
                    })
                    .collect::<Vec<String>>(),
            );
        }
        for (i, d) in domains.iter().enumerate() {
            odometer[i] += 1;
            if odometer[i] < d.len() {
                continue 'outer;
            }
            odometer[i] = 0;
        }
        break;
    }
    rows.sort();
    if query.distinct {
        rows.dedup();
    }
    Some(rows)
}
