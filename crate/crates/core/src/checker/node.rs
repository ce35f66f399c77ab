use std::collections::BTreeSet;

use super::{Correction, CorrectionStage, DefectKind, UnresolvedDefect};
use crate::cypher::{serialize_node, serialize_rel, CypherQuery, NodeRef};
use crate::graph::{EntityIndex, GraphSchema};

/// The relationship hops touching a node occurrence, as (hop index, neighbour).
fn adjacent_hops(query: &CypherQuery, at: NodeRef) -> Vec<(usize, NodeRef)> {
    let hops = query.patterns[at.pattern].hops.len();
    let mut out = Vec::with_capacity(2);
    if at.position > 0 {
        out.push((at.position - 1, NodeRef { position: at.position - 1, ..at }));
    }
    if at.position < hops {
        out.push((at.position, NodeRef { position: at.position + 1, ..at }));
    }
    out
}

/// `relation` can join `label` and the neighbour in some orientation.
fn fits(schema: &GraphSchema, relation: &str, label: &str, neighbour: Option<&str>) -> bool {
    match neighbour {
        Some(n) => schema.relations_between(label, n).contains(relation),
        None => schema.relations_touching(label).contains(relation),
    }
}

/// Relabels named nodes whose label disagrees with the entity index, then
/// swaps in the only relationship type that fits a relabelled node when the
/// original one no longer does.
pub fn node_type_check(
    query: &CypherQuery,
    index: &EntityIndex,
    schema: &GraphSchema,
) -> (CypherQuery, Vec<Correction>, Vec<UnresolvedDefect>) {
    let mut q = query.clone();
    let mut corrections = Vec::new();
    let mut unresolved = Vec::new();
    let mut missing = BTreeSet::new();

    for at in q.node_refs() {
        let node = q.node(at).clone();
        let (Some(name), Some(label)) = (&node.name, &node.label) else {
            if let Some(name) = &node.name {
                if index.lookup(name).is_empty() && missing.insert(name.clone()) {
                    unresolved
                        .push(UnresolvedDefect::new(DefectKind::UnknownEntity, format!("no node named \"{name}\"")));
                }
            }
            continue;
        };
        let known = index.lookup(name);
        if known.is_empty() {
            if missing.insert(name.clone()) {
                unresolved.push(UnresolvedDefect::new(DefectKind::UnknownEntity, format!("no node named \"{name}\"")));
            }
            continue;
        }
        if known.contains(label) {
            continue;
        }

        let adjacent = adjacent_hops(&q, at);
        let fitting: Vec<&String> = known
            .iter()
            .filter(|cand| {
                adjacent.iter().all(|&(hop, nb)| {
                    fits(schema, &q.patterns[at.pattern].rel(hop).relation, cand, q.effective_label(nb))
                })
            })
            .collect();
        let chosen = fitting.first().copied().or_else(|| known.iter().next()).cloned().unwrap_or_default();
        let mut description = format!("\"{name}\" is a {chosen}, not a {label}");
        if fitting.len() > 1 || (fitting.is_empty() && known.len() > 1) {
            let all: Vec<&str> = known.iter().map(String::as_str).collect();
            description.push_str(&format!(" (ambiguous: also found as {}; picked {chosen})", all.join(", ")));
        }

        let before = serialize_node(&node);
        q.node_mut(at).label = Some(chosen.clone());
        if let Some(var) = &node.variable {
            for other in q.node_refs() {
                let n = q.node_mut(other);
                if n.variable.as_ref() == Some(var) && n.label.as_ref() == Some(label) {
                    n.label = Some(chosen.clone());
                }
            }
        }
        corrections.push(Correction {
            stage: CorrectionStage::NodeType,
            description,
            before,
            after: serialize_node(q.node(at)),
        });

        for (hop, nb) in adjacent {
            let neighbour = q.effective_label(nb).map(str::to_string);
            let current = q.patterns[at.pattern].rel(hop).clone();
            if fits(schema, &current.relation, &chosen, neighbour.as_deref()) {
                continue;
            }
            let options = match &neighbour {
                Some(n) => schema.relations_between(&chosen, n),
                None => schema.relations_touching(&chosen),
            };
            if options.len() != 1 {
                continue;
            }
            let replacement = options.into_iter().next().unwrap_or_default().to_string();
            let rel = &mut q.patterns[at.pattern].hops[hop].0;
            rel.relation = replacement.clone();
            corrections.push(Correction {
                stage: CorrectionStage::RelationAdjust,
                description: format!(
                    "'{}' does not connect {chosen} here; '{replacement}' is the only relationship that does",
                    current.relation
                ),
                before: serialize_rel(&current),
                after: serialize_rel(rel),
            });
        }
    }

    let mut reported = BTreeSet::new();
    for at in q.node_refs() {
        if let Some(label) = &q.node(at).label {
            if !schema.has_label(label) && reported.insert(label.clone()) {
                unresolved.push(UnresolvedDefect::new(
                    DefectKind::UnknownLabel,
                    format!("label '{label}' is not in the schema"),
                ));
            }
        }
    }
    (q, corrections, unresolved)
}
