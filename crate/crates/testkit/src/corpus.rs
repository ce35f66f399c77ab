//! Query corpora over a real knowledge base for checker properties.
//!
//! Valid queries come from random walks over the graph itself, so every
//! label, direction and name they mention exists by construction.

use rand::seq::IndexedRandom;
use rand::Rng;

use graphqa_core::cypher::{serialize_query, CypherQuery, Direction, NodePattern, PathPattern, RelPattern, ReturnItem};
use graphqa_core::fixture::{mutate_query, Mutation};
use graphqa_core::graph::PropertyGraph;
use graphqa_core::pipeline::KnowledgeBase;

use crate::ast::noncanonical_text;
use crate::shapes::shape;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryKind {
    /// Schema-valid, canonical text.
    Valid,
    /// Schema-valid, spelled differently from the canonical form.
    ValidNoncanonical,
    Mutated(Mutation),
    /// Several repairable defects at once.
    Compound,
    UnknownName,
    UnknownRelation,
}

impl EntryKind {
    pub fn is_valid(&self) -> bool {
        matches!(self, EntryKind::Valid | EntryKind::ValidNoncanonical)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub text: String,
    pub kind: EntryKind,
    pub structure: u8,
}

/// One step from `node`: an incident edge in either direction. Returns the
/// neighbour and the relation, with the direction as written from `node`.
fn step<R: Rng>(rng: &mut R, g: &PropertyGraph, node: usize) -> Option<(usize, String, Direction)> {
    let id = &g.nodes()[node].id;
    let incident: Vec<_> = g.edges().iter().filter(|e| &e.source == id || &e.target == id).collect();
    let e = incident.choose(rng)?;
    let index = |id: &str| g.nodes().iter().position(|n| n.id == id).expect("edge endpoints exist");
    if &e.source == id {
        Some((index(&e.target), e.relation.clone(), Direction::LeftToRight))
    } else {
        Some((index(&e.source), e.relation.clone(), Direction::RightToLeft))
    }
}

/// A schema-valid query of the given structure, or `None` if the walk hit a
/// dead end.
pub fn valid_query<R: Rng>(rng: &mut R, kb: &KnowledgeBase, structure: u8) -> Option<CypherQuery> {
    let g = &kb.graph;
    let shape = shape(structure);
    let vars = ["a", "b", "c", "m"];
    let mut bound: Vec<Option<usize>> = vec![None; shape.slots];
    bound[shape.ret] = Some(rng.random_range(0..g.node_count()));

    // Walk each path backwards from its last slot (the answer) to its anchor.
    let mut hops: Vec<Vec<(String, Direction)>> = Vec::new();
    for layout in &shape.paths {
        let mut rels = Vec::new();
        for w in layout.windows(2).rev() {
            let (left, right) = (w[0], w[1]);
            let here = bound[right].expect("walk proceeds from bound slots");
            let (next, relation, dir_from_here) = step(rng, g, here)?;
            bound[left] = Some(next);
            // written left -> right, so flip the direction seen from `right`
            rels.push((relation, dir_from_here.flipped()));
        }
        rels.reverse();
        hops.push(rels);
    }

    let mut named = vec![false; shape.slots];
    let mut patterns = Vec::new();
    for (layout, rels) in shape.paths.iter().zip(hops) {
        let node = |rng: &mut R, slot: usize, named: &mut Vec<bool>| {
            let n = &g.nodes()[bound[slot].expect("all slots bound")];
            let anchor = slot == layout[0] && !named[slot];
            if anchor {
                named[slot] = true;
            }
            let label = (if anchor { rng.random_bool(0.85) } else { rng.random_bool(0.6) }).then_some(n.label.as_str());
            NodePattern::new(Some(vars[slot]), label, anchor.then_some(n.name.as_str()))
        };
        let mut path = PathPattern::single(node(rng, layout[0], &mut named));
        for (&slot, (relation, dir)) in layout[1..].iter().zip(rels) {
            path = path.then(RelPattern::new(&relation, dir), node(rng, slot, &mut named));
        }
        patterns.push(path);
    }
    Some(CypherQuery { patterns, return_items: vec![ReturnItem::name_of(vars[shape.ret])], distinct: false })
}

/// `n` queries: about half valid (half of those in non-canonical spelling),
/// the rest carrying one injected defect each.
pub fn checker_corpus<R: Rng>(rng: &mut R, kb: &KnowledgeBase, n: usize) -> Vec<CorpusEntry> {
    let mut out = Vec::with_capacity(n);
    let mut i = 0usize;
    while out.len() < n {
        let structure = (i % 5) as u8 + 1;
        i += 1;
        let Some(q) = valid_query(rng, kb, structure) else { continue };
        let canonical = serialize_query(&q);
        let entry = |text: String, kind: EntryKind| CorpusEntry { text, kind, structure };
        let e = match rng.random_range(0..8) {
            0 | 1 => entry(canonical, EntryKind::Valid),
            2 | 3 => entry(noncanonical_text(rng, &q), EntryKind::ValidNoncanonical),
            4 => {
                let m = [
                    Mutation::WrongLabel,
                    Mutation::ReversedDirection,
                    Mutation::BareReturn,
                    Mutation::Asterisk,
                    Mutation::TruncatedPath,
                ]
                .choose(rng)
                .copied()
                .expect("non-empty");
                match mutate_query(&canonical, m, &kb.schema) {
                    Some(text) => entry(text, EntryKind::Mutated(m)),
                    None => continue,
                }
            }
            5 => {
                let mut bad = q.clone();
                let mut repairable = Mutation::REPAIRABLE.to_vec();
                repairable.retain(|_| rng.random_bool(0.7));
                let mut text = serialize_query(&bad);
                for m in &repairable {
                    if let Some(t) = mutate_query(&text, *m, &kb.schema) {
                        text = t;
                    }
                }
                if text == canonical {
                    bad.return_items[0].property = None;
                    text = serialize_query(&bad);
                }
                entry(text, EntryKind::Compound)
            }
            6 => {
                let mut bad = q.clone();
                bad.patterns[0].start.name = Some("no such entity".into());
                entry(serialize_query(&bad), EntryKind::UnknownName)
            }
            _ => {
                let mut bad = q.clone();
                bad.patterns[0].hops[0].0.relation = "made up relation".into();
                entry(serialize_query(&bad), EntryKind::UnknownRelation)
            }
        };
        out.push(e);
    }
    out
}
