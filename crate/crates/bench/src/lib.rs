//! Inputs shared by the benchmarks: the fixture knowledge base and its gold
//! queries, each paired with a damaged copy the checker has to repair.

use graphqa_core::fixture::{generate_fixture, mutate_with_fallback, Mutation, DEFAULT_SEED};
use graphqa_core::pipeline::KnowledgeBase;

pub struct Workload {
    pub kb: KnowledgeBase,
    pub gold: Vec<String>,
    pub damaged: Vec<String>,
}

pub fn workload() -> Workload {
    let fixture = generate_fixture(DEFAULT_SEED);
    let kb = KnowledgeBase::new(fixture.graph);
    let gold: Vec<String> = fixture.items.iter().filter_map(|i| i.gold_cypher.clone()).collect();
    let damaged = gold
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let m = Mutation::REPAIRABLE[i % Mutation::REPAIRABLE.len()];
            mutate_with_fallback(q, m, &kb.schema).map_or_else(|| q.clone(), |(_, text)| text)
        })
        .collect();
    Workload { kb, gold, damaged }
}
