use std::collections::HashMap;

use serde::Serialize;

use super::PropertyGraph;
use crate::cypher::{serialize_return_item, CypherQuery, Direction};
use crate::ident::{escape_identifier, quote_string};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("RETURN refers to variable '{0}', which is not bound in MATCH")]
    UnboundVariable(String),
    #[error("query has no MATCH pattern or no RETURN item")]
    EmptyQuery,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub columns: Vec<String>,
    /// Sorted lexicographically; duplicates kept unless the query is DISTINCT.
    pub rows: Vec<Vec<String>>,
}

impl QueryResult {
    /// One string per row, columns joined with `", "`.
    pub fn flatten(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.join(", ")).collect()
    }
}

/// A node variable (or an anonymous node occurrence) to be bound.
#[derive(Default)]
struct Slot {
    labels: Vec<String>,
    names: Vec<String>,
}

struct RelConstraint {
    left: usize,
    right: usize,
    relation: String,
    direction: Direction,
    path: usize,
}

impl RelConstraint {
    /// (source slot, target slot) of the matched edge.
    fn ends(&self) -> (usize, usize) {
        match self.direction {
            Direction::LeftToRight => (self.left, self.right),
            Direction::RightToLeft => (self.right, self.left),
        }
    }
}

/// Finds every binding of the query's node slots that satisfies all path
/// patterns at once.
///
/// Variables shared between paths join them. Within one path an edge may be
/// matched only once. Each binding yields one row; unknown labels or
/// relations simply match nothing.
pub fn execute_query(graph: &PropertyGraph, query: &CypherQuery) -> Result<QueryResult, ExecError> {
    if query.patterns.is_empty() || query.return_items.is_empty() {
        return Err(ExecError::EmptyQuery);
    }
    let mut slots: Vec<Slot> = Vec::new();
    let mut by_var: HashMap<&str, usize> = HashMap::new();
    let mut rels = Vec::new();
    for (p, path) in query.patterns.iter().enumerate() {
        let mut occurrence = Vec::with_capacity(path.node_count());
        for node in path.nodes() {
            let slot = match &node.variable {
                Some(v) => *by_var.entry(v.as_str()).or_insert_with(|| {
                    slots.push(Slot::default());
                    slots.len() - 1
                }),
                None => {
                    slots.push(Slot::default());
                    slots.len() - 1
                }
            };
            slots[slot].labels.extend(node.label.clone());
            slots[slot].names.extend(node.name.clone());
            occurrence.push(slot);
        }
        for (i, (rel, _)) in path.hops.iter().enumerate() {
            rels.push(RelConstraint {
                left: occurrence[i],
                right: occurrence[i + 1],
                relation: rel.relation.clone(),
                direction: rel.direction,
                path: p,
            });
        }
    }
    let projection: Vec<usize> = query
        .return_items
        .iter()
        .map(|item| {
            by_var.get(item.variable.as_str()).copied().ok_or_else(|| ExecError::UnboundVariable(item.variable.clone()))
        })
        .collect::<Result<_, _>>()?;

    let candidates: Vec<Vec<usize>> = slots.iter().map(|s| slot_candidates(graph, s)).collect();
    let order = plan(&candidates, &rels);
    let mut search = Search {
        graph,
        rels: &rels,
        candidates: &candidates,
        order: &order,
        assignment: vec![usize::MAX; slots.len()],
        paths: query.patterns.len(),
        query,
        projection: &projection,
        rows: Vec::new(),
    };
    search.extend(0);
    let mut rows = search.rows;
    rows.sort();
    if query.distinct {
        rows.dedup();
    }
    let columns = query.return_items.iter().map(serialize_return_item).collect();
    Ok(QueryResult { columns, rows })
}

fn slot_candidates(graph: &PropertyGraph, slot: &Slot) -> Vec<usize> {
    let base: Vec<usize> = if let Some(name) = slot.names.first() {
        graph.nodes_with_name(name).to_vec()
    } else if let Some(label) = slot.labels.first() {
        graph.nodes_with_label(label).to_vec()
    } else {
        (0..graph.node_count()).collect()
    };
    base.into_iter()
        .filter(|&n| {
            let node = &graph.nodes()[n];
            slot.labels.iter().all(|l| *l == node.label) && slot.names.iter().all(|m| *m == node.name)
        })
        .collect()
}

/// Binding order: most selective slot first, then always a slot adjacent to
/// one already bound, so candidates come from adjacency lists.
fn plan(candidates: &[Vec<usize>], rels: &[RelConstraint]) -> Vec<usize> {
    let n = candidates.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let adjacent = (0..n)
            .filter(|&s| !placed[s])
            .filter(|&s| rels.iter().any(|r| (r.left == s && placed[r.right]) || (r.right == s && placed[r.left])))
            .min_by_key(|&s| (candidates[s].len(), s));
        let next = adjacent.unwrap_or_else(|| {
            (0..n).filter(|&s| !placed[s]).min_by_key(|&s| (candidates[s].len(), s)).expect("unplaced slot")
        });
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a> {
    graph: &'a PropertyGraph,
    rels: &'a [RelConstraint],
    candidates: &'a [Vec<usize>],
    order: &'a [usize],
    assignment: Vec<usize>,
    paths: usize,
    query: &'a CypherQuery,
    projection: &'a [usize],
    rows: Vec<Vec<String>>,
}

impl Search<'_> {
    fn bound(&self, slot: usize) -> bool {
        self.assignment[slot] != usize::MAX
    }

    fn edge(&self, rel: &RelConstraint) -> Option<usize> {
        let (s, t) = rel.ends();
        let (s, t) = (self.assignment[s], self.assignment[t]);
        self.graph
            .outgoing(s)
            .iter()
            .copied()
            .find(|&e| self.graph.edge_ends(e).1 == t && self.graph.edges()[e].relation == rel.relation)
    }

    fn extend(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.emit();
            return;
        }
        let slot = self.order[depth];
        for node in self.choices(slot) {
            self.assignment[slot] = node;
            let consistent = self
                .rels
                .iter()
                .filter(|r| (r.left == slot || r.right == slot) && self.bound(r.left) && self.bound(r.right))
                .all(|r| self.edge(r).is_some());
            if consistent {
                self.extend(depth + 1);
            }
        }
        self.assignment[slot] = usize::MAX;
    }

    /// Candidate nodes for `slot`, narrowed through a bound neighbour if any.
    fn choices(&self, slot: usize) -> Vec<usize> {
        let anchor = self.rels.iter().find_map(|r| {
            let (s, t) = r.ends();
            if s == slot && t != slot && self.bound(t) {
                Some((r, false))
            } else if t == slot && s != slot && self.bound(s) {
                Some((r, true))
            } else {
                None
            }
        });
        let allowed = &self.candidates[slot];
        match anchor {
            None => allowed.clone(),
            Some((rel, from_source)) => {
                let (s, t) = rel.ends();
                let mut out: Vec<usize> = if from_source {
                    let src = self.assignment[s];
                    self.graph
                        .outgoing(src)
                        .iter()
                        .filter(|&&e| self.graph.edges()[e].relation == rel.relation)
                        .map(|&e| self.graph.edge_ends(e).1)
                        .collect()
                } else {
                    let dst = self.assignment[t];
                    self.graph
                        .incoming(dst)
                        .iter()
                        .filter(|&&e| self.graph.edges()[e].relation == rel.relation)
                        .map(|&e| self.graph.edge_ends(e).0)
                        .collect()
                };
                out.retain(|n| allowed.binary_search(n).is_ok());
                out.sort_unstable();
                out
            }
        }
    }

    fn emit(&mut self) {
        // relationship uniqueness within each path
        let mut used: Vec<Vec<usize>> = vec![Vec::new(); self.paths];
        for rel in self.rels {
            let Some(e) = self.edge(rel) else { return };
            if used[rel.path].contains(&e) {
                return;
            }
            used[rel.path].push(e);
        }
        let row = self
            .query
            .return_items
            .iter()
            .zip(self.projection)
            .map(|(item, &slot)| {
                let node = &self.graph.nodes()[self.assignment[slot]];
                match item.property.as_deref() {
                    Some("name") => node.name.clone(),
                    Some(p) => node.properties.get(p).cloned().unwrap_or_else(|| "null".into()),
                    None => format!("(:{} {{name:{}}})", escape_identifier(&node.label), quote_string(&node.name)),
                }
            })
            .collect();
        self.rows.push(row);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cypher::parse_query;
    use crate::graph::test_support::graph;

    fn run(g: &PropertyGraph, q: &str) -> Vec<Vec<String>> {
        execute_query(g, &parse_query(q).unwrap()).unwrap().rows
    }

    fn ms_graph() -> PropertyGraph {
        graph(
            &[
                ("ms", "disease", "multiple sclerosis"),
                ("d1", "drug", "fingolimod"),
                ("d2", "drug", "interferon beta-1a"),
                ("d3", "drug", "aspirin"),
                ("x", "disease", "migraine"),
            ],
            &[
                ("d1", "contraindication", "ms"),
                ("d2", "contraindication", "ms"),
                ("d3", "contraindication", "x"),
                ("d2", "indication", "ms"),
            ],
        )
    }

    #[test]
    fn contraindicated_drugs() {
        let rows = run(
            &ms_graph(),
            "MATCH (d:disease {name:\"multiple sclerosis\"})<-[:contraindication]-(dr:drug) RETURN dr.name",
        );
        assert_eq!(rows, vec![vec!["fingolimod".to_string()], vec!["interferon beta-1a".to_string()]]);
    }

    #[test]
    fn empty_graph() {
        assert!(run(&PropertyGraph::empty(), "MATCH (a:drug) RETURN a.name").is_empty());
    }

    #[test]
    fn unknown_schema_elements_match_nothing() {
        let g = ms_graph();
        assert!(run(&g, "MATCH (a:pathway) RETURN a.name").is_empty());
        assert!(run(&g, "MATCH (a:drug)-[:nope]->(b) RETURN b.name").is_empty());
        // wrong direction matches nothing
        assert!(run(
            &g,
            "MATCH (d:disease {name:\"multiple sclerosis\"})-[:contraindication]->(dr:drug) RETURN dr.name"
        )
        .is_empty());
    }

    #[test]
    fn unbound_return_variable() {
        let q = parse_query("MATCH (a:drug) RETURN b.name").unwrap();
        assert_eq!(execute_query(&ms_graph(), &q), Err(ExecError::UnboundVariable("b".into())));
    }

    #[test]
    fn bag_semantics_and_distinct() {
        let g = ms_graph();
        // each (drug, disease) contraindication pair is one row of the disease
        let rows = run(&g, "MATCH (dr:drug)-[:contraindication]->(d:disease) RETURN d.name");
        assert_eq!(rows.len(), 3);
        let rows = run(&g, "MATCH (dr:drug)-[:contraindication]->(d:disease) RETURN DISTINCT d.name");
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn shared_variables_join_patterns() {
        let rows = run(
            &ms_graph(),
            "MATCH (dr:drug)-[:contraindication]->(d:disease {name:\"multiple sclerosis\"}), (dr)-[:indication]->(d) RETURN dr.name",
        );
        assert_eq!(rows, vec![vec!["interferon beta-1a".to_string()]]);
    }

    #[test]
    fn edge_not_reused_within_path() {
        let g = graph(&[("a", "x", "A"), ("b", "x", "B")], &[("a", "r", "b")]);
        assert!(run(&g, "MATCH (p:x)-[:r]->(q:x)<-[:r]-(s:x) RETURN s.name").is_empty());
        // across separate patterns the same edge may match twice
        let rows = run(&g, "MATCH (p:x)-[:r]->(q:x), (q)<-[:r]-(s:x) RETURN s.name");
        assert_eq!(rows, vec![vec!["A".to_string()]]);
    }

    #[test]
    fn bare_node_and_other_properties() {
        let rows = run(&ms_graph(), "MATCH (d:disease {name:\"migraine\"}) RETURN d, d.code");
        assert_eq!(rows, vec![vec!["(:disease {name:\"migraine\"})".to_string(), "null".to_string()]]);
    }

    #[test]
    fn self_loop_variable() {
        let g = graph(&[("a", "x", "A"), ("b", "x", "B")], &[("a", "r", "a"), ("a", "r", "b")]);
        let rows = run(&g, "MATCH (p:x)-[:r]->(p) RETURN p.name");
        assert_eq!(rows, vec![vec!["A".to_string()]]);
    }
}
