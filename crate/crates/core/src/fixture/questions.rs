//! Benchmark questions by path enumeration over the transformed fixture
//! graph. Every candidate path shape is enumerated, answer sets are computed
//! by set algebra over neighbourhoods, and the gold query's execution must
//! agree before an item is emitted.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::catalogue::{RelSpec, RELATIONS};
use super::QUESTIONS_PER_STRUCTURE;
use crate::benchmark::{hops_for_structure, BenchmarkItem};
use crate::cypher::{serialize_query, CypherQuery, Direction, NodePattern, PathPattern, RelPattern, ReturnItem};
use crate::graph::{execute_query, PropertyGraph};

const MAX_ANSWERS: usize = 6;

/// Walking one relation type from `from` nodes to `to` nodes.
#[derive(Clone, Copy)]
struct Step {
    spec: &'static RelSpec,
    forward: bool,
}

impl Step {
    fn from(&self) -> &'static str {
        if self.forward {
            self.spec.x
        } else {
            self.spec.y
        }
    }

    fn to(&self) -> &'static str {
        if self.forward {
            self.spec.y
        } else {
            self.spec.x
        }
    }

    fn phrase(&self, x: &str) -> String {
        let template = if self.forward { self.spec.forward } else { self.spec.backward };
        template.replace("{x}", x)
    }

    /// The relationship as written when the path runs from `from` to `to`.
    fn rel(&self) -> RelPattern {
        let dir = if self.forward { Direction::LeftToRight } else { Direction::RightToLeft };
        RelPattern::new(self.spec.name(), dir)
    }

    /// The relationship as written when the path runs from `to` to `from`.
    fn rel_reversed(&self) -> RelPattern {
        let r = self.rel();
        RelPattern::new(&r.relation, r.direction.flipped())
    }
}

fn steps() -> Vec<Step> {
    let mut out = Vec::new();
    for spec in RELATIONS {
        out.push(Step { spec, forward: true });
        if !spec.is_self() {
            out.push(Step { spec, forward: false });
        }
    }
    out
}

struct Neighbourhoods<'g> {
    graph: &'g PropertyGraph,
    cache: HashMap<(usize, usize), BTreeSet<usize>>,
}

impl<'g> Neighbourhoods<'g> {
    fn new(graph: &'g PropertyGraph, steps: &[Step]) -> Self {
        let mut cache = HashMap::new();
        for (s, step) in steps.iter().enumerate() {
            for &n in graph.nodes_with_label(step.from()) {
                let edges = if step.forward { graph.outgoing(n) } else { graph.incoming(n) };
                let set: BTreeSet<usize> = edges
                    .iter()
                    .filter(|&&e| graph.edges()[e].relation == step.spec.name())
                    .map(|&e| {
                        let (src, dst) = graph.edge_ends(e);
                        if step.forward {
                            dst
                        } else {
                            src
                        }
                    })
                    .filter(|&m| graph.nodes()[m].label == step.to())
                    .collect();
                if !set.is_empty() {
                    cache.insert((n, s), set);
                }
            }
        }
        Self { graph, cache }
    }

    fn of(&self, node: usize, step: usize) -> Option<&BTreeSet<usize>> {
        self.cache.get(&(node, step))
    }

    fn of_set(&self, nodes: &BTreeSet<usize>, step: usize) -> BTreeSet<usize> {
        nodes.iter().filter_map(|&n| self.of(n, step)).flatten().copied().collect()
    }

    fn name(&self, n: usize) -> &'g str {
        &self.graph.nodes()[n].name
    }
}

struct Candidate {
    structure: u8,
    question: String,
    gold: CypherQuery,
    answers: BTreeSet<usize>,
    anchors: Vec<String>,
    relations: Vec<&'static str>,
}

fn node(var: &str, label: &str, name: Option<&str>) -> NodePattern {
    NodePattern::new(Some(var), Some(label), name)
}

fn query(path: PathPattern, ret: &str) -> CypherQuery {
    CypherQuery { patterns: vec![path], return_items: vec![ReturnItem::name_of(ret)], distinct: false }
}

fn distinct_labels(labels: &[&str]) -> bool {
    labels.iter().collect::<BTreeSet<_>>().len() == labels.len()
}

fn usable(answers: &BTreeSet<usize>) -> bool {
    (1..=MAX_ANSWERS).contains(&answers.len())
}

fn enumerate(graph: &PropertyGraph) -> Vec<Candidate> {
    let steps = steps();
    let nb = Neighbourhoods::new(graph, &steps);
    let anchors = |step: &Step| graph.nodes_with_label(step.from()).to_vec();
    let mut out = Vec::new();

    // 1: A -> x
    for (s, step) in steps.iter().enumerate() {
        for a in anchors(step) {
            let Some(ans) = nb.of(a, s) else { continue };
            if !usable(ans) {
                continue;
            }
            let an = nb.name(a);
            out.push(Candidate {
                structure: 1,
                question: format!("What are the names of the {}?", step.phrase(an)),
                gold: query(
                    PathPattern::single(node("a", step.from(), Some(an))).then(step.rel(), node("b", step.to(), None)),
                    "b",
                ),
                answers: ans.clone(),
                anchors: vec![an.to_string()],
                relations: vec![step.spec.name()],
            });
        }
    }

    // 2: A -> m -> x
    for (s1, st1) in steps.iter().enumerate() {
        for (s2, st2) in steps.iter().enumerate() {
            if st1.to() != st2.from() || !distinct_labels(&[st1.from(), st1.to(), st2.to()]) {
                continue;
            }
            for a in anchors(st1) {
                let Some(mid) = nb.of(a, s1) else { continue };
                let ans = nb.of_set(mid, s2);
                if !usable(&ans) {
                    continue;
                }
                let an = nb.name(a);
                let path = PathPattern::single(node("a", st1.from(), Some(an)))
                    .then(st1.rel(), node("b", st1.to(), None))
                    .then(st2.rel(), node("c", st2.to(), None));
                out.push(Candidate {
                    structure: 2,
                    question: format!("What are the {}?", st2.phrase(&format!("the {}", st1.phrase(an)))),
                    gold: query(path, "c"),
                    answers: ans,
                    anchors: vec![an.to_string()],
                    relations: vec![st1.spec.name(), st2.spec.name()],
                });
            }
        }
    }

    // 3: A -> x <- B
    for (s1, st1) in steps.iter().enumerate() {
        for (s2, st2) in steps.iter().enumerate() {
            if st1.to() != st2.to() || st1.from() == st1.to() || st2.from() == st2.to() {
                continue;
            }
            for a in anchors(st1) {
                let Some(na) = nb.of(a, s1) else { continue };
                for b in anchors(st2) {
                    if a == b {
                        continue;
                    }
                    let Some(nbb) = nb.of(b, s2) else { continue };
                    let ans: BTreeSet<usize> = na.intersection(nbb).copied().collect();
                    if !usable(&ans) || (s1 == s2 && ans == *na) {
                        continue;
                    }
                    let (an, bn) = (nb.name(a), nb.name(b));
                    let path = PathPattern::single(node("a", st1.from(), Some(an)))
                        .then(st1.rel(), node("m", st1.to(), None))
                        .then(st2.rel_reversed(), node("b", st2.from(), Some(bn)));
                    out.push(Candidate {
                        structure: 3,
                        question: format!("Which of the {} are also {}?", st1.phrase(an), st2.phrase(bn)),
                        gold: query(path, "m"),
                        answers: ans,
                        anchors: vec![an.to_string(), bn.to_string()],
                        relations: vec![st1.spec.name(), st2.spec.name()],
                    });
                }
            }
        }
    }

    // 4: A -> p -> q -> x
    for (s1, st1) in steps.iter().enumerate() {
        for (s2, st2) in steps.iter().enumerate() {
            if st1.to() != st2.from() || !distinct_labels(&[st1.from(), st1.to(), st2.to()]) {
                continue;
            }
            for (s3, st3) in steps.iter().enumerate() {
                if st2.to() != st3.from() || !distinct_labels(&[st1.from(), st1.to(), st2.to(), st3.to()]) {
                    continue;
                }
                for a in anchors(st1) {
                    let Some(p) = nb.of(a, s1) else { continue };
                    let ans = nb.of_set(&nb.of_set(p, s2), s3);
                    if !usable(&ans) {
                        continue;
                    }
                    let an = nb.name(a);
                    let path = PathPattern::single(node("a", st1.from(), Some(an)))
                        .then(st1.rel(), node("b", st1.to(), None))
                        .then(st2.rel(), node("c", st2.to(), None))
                        .then(st3.rel(), node("d", st3.to(), None));
                    let inner = format!("the {}", st2.phrase(&format!("the {}", st1.phrase(an))));
                    out.push(Candidate {
                        structure: 4,
                        question: format!("What are the {}?", st3.phrase(&inner)),
                        gold: query(path, "d"),
                        answers: ans,
                        anchors: vec![an.to_string()],
                        relations: vec![st1.spec.name(), st2.spec.name(), st3.spec.name()],
                    });
                }
            }
        }
    }

    // 5: A -> x <- e <- B, i.e. x is reached from A and from the e's reached from B
    for (s3, st3) in steps.iter().enumerate() {
        for (s2, st2) in steps.iter().enumerate() {
            if st3.to() != st2.from() || !distinct_labels(&[st3.from(), st3.to(), st2.to()]) {
                continue;
            }
            for b in anchors(st3) {
                let Some(e) = nb.of(b, s3) else { continue };
                let via_b = nb.of_set(e, s2);
                if via_b.is_empty() {
                    continue;
                }
                for (s1, st1) in steps.iter().enumerate() {
                    if st1.to() != st2.to() || !distinct_labels(&[st1.from(), st2.to(), st3.to(), st3.from()]) {
                        continue;
                    }
                    for a in anchors(st1) {
                        let Some(na) = nb.of(a, s1) else { continue };
                        let ans: BTreeSet<usize> = na.intersection(&via_b).copied().collect();
                        if !usable(&ans) {
                            continue;
                        }
                        let (an, bn) = (nb.name(a), nb.name(b));
                        let path = PathPattern::single(node("a", st1.from(), Some(an)))
                            .then(st1.rel(), node("m", st1.to(), None))
                            .then(st2.rel_reversed(), node("e", st2.from(), None))
                            .then(st3.rel_reversed(), node("b", st3.from(), Some(bn)));
                        out.push(Candidate {
                            structure: 5,
                            question: format!(
                                "Which of the {} are also {}?",
                                st1.phrase(an),
                                st2.phrase(&format!("the {}", st3.phrase(bn)))
                            ),
                            gold: query(path, "m"),
                            answers: ans,
                            anchors: vec![an.to_string(), bn.to_string()],
                            relations: vec![st1.spec.name(), st2.spec.name(), st3.spec.name()],
                        });
                    }
                }
            }
        }
    }
    out
}

/// The running examples, placed first in their structure when present.
fn is_running_example(c: &Candidate) -> bool {
    let has = |a: &str| c.anchors.iter().any(|x| x == a);
    match c.structure {
        1 => has("multiple sclerosis") && c.relations == ["contraindication"],
        2 => has("Richter syndrome") && c.relations == ["indication", "side effect"],
        3 => has("POMC") && has("neuromyelitis optica"),
        4 => {
            has("multiple sclerosis")
                && c.relations
                    == ["disease linked to exposure", "interacts with gene_protein", "interacts with pathway"]
        }
        5 => {
            has("APOE")
                && has("multiple sclerosis")
                && c.relations[0] == "interacts with biological process"
                && c.relations[2] == "disease linked to exposure"
        }
        _ => false,
    }
}

fn select(mut candidates: Vec<Candidate>, rng: &mut ChaCha8Rng) -> Vec<Candidate> {
    candidates.sort_by(|a, b| a.question.cmp(&b.question));
    candidates.dedup_by(|a, b| a.question == b.question);
    candidates.shuffle(rng);
    if let Some(i) = candidates.iter().position(is_running_example) {
        let c = candidates.remove(i);
        candidates.insert(0, c);
    }
    // at most one question per relation sequence and two per anchor, relaxed
    // only if that leaves too few
    let mut picked: Vec<usize> = Vec::new();
    for relaxed in [false, true] {
        let mut per_relations: BTreeMap<Vec<&str>, usize> = BTreeMap::new();
        let mut per_anchor: BTreeMap<&str, usize> = BTreeMap::new();
        for &i in &picked {
            *per_relations.entry(candidates[i].relations.clone()).or_default() += 1;
            for a in &candidates[i].anchors {
                *per_anchor.entry(a).or_default() += 1;
            }
        }
        for (i, c) in candidates.iter().enumerate() {
            if picked.len() == QUESTIONS_PER_STRUCTURE {
                break;
            }
            if picked.contains(&i) {
                continue;
            }
            let crowded = per_relations.get(&c.relations).copied().unwrap_or(0) >= 1
                || c.anchors.iter().any(|a| per_anchor.get(a.as_str()).copied().unwrap_or(0) >= 2);
            if crowded && !relaxed {
                continue;
            }
            *per_relations.entry(c.relations.clone()).or_default() += 1;
            for a in &c.anchors {
                *per_anchor.entry(a).or_default() += 1;
            }
            picked.push(i);
        }
    }
    let mut keep = vec![false; candidates.len()];
    for &i in &picked {
        keep[i] = true;
    }
    let mut order: Vec<(usize, Candidate)> = candidates.into_iter().enumerate().filter(|(i, _)| keep[*i]).collect();
    order.sort_by_key(|(i, _)| picked.iter().position(|p| p == i));
    order.into_iter().map(|(_, c)| c).collect()
}

pub(super) fn generate_items(graph: &PropertyGraph, seed: u64) -> Vec<BenchmarkItem> {
    let mut by_structure: BTreeMap<u8, Vec<Candidate>> = BTreeMap::new();
    for c in enumerate(graph) {
        by_structure.entry(c.structure).or_default().push(c);
    }
    let mut items = Vec::new();
    for (structure, candidates) in by_structure {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(structure));
        for (k, c) in select(candidates, &mut rng).into_iter().enumerate() {
            let result = execute_query(graph, &c.gold).expect("gold queries bind their return variable");
            let expected: BTreeSet<String> = result.flatten().into_iter().collect();
            let computed: BTreeSet<String> = c.answers.iter().map(|&n| graph.nodes()[n].name.clone()).collect();
            assert_eq!(expected, computed, "gold query disagrees with enumeration for {}", c.question);
            items.push(BenchmarkItem {
                id: format!("s{structure}-q{:02}", k + 1),
                question: c.question,
                structure,
                hops: hops_for_structure(structure).expect("structures are 1-5"),
                expected_answers: expected,
                gold_cypher: Some(serialize_query(&c.gold)),
            });
        }
    }
    items
}
