//! Controlled damage to gold queries, used to build oracle transcripts whose
//! answers exercise the checker.

use serde::{Deserialize, Serialize};

use crate::benchmark::{BenchmarkItem, RunConfig};
use crate::cypher::{parse_query, serialize_query, CypherQuery, NodePattern};
use crate::graph::GraphSchema;
use crate::llm::{render_prompt, TranscriptError, TranscriptStore};
use crate::pipeline::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// The named anchor node carries a label that does not hold its name.
    WrongLabel,
    /// One relation between different labels points the wrong way.
    ReversedDirection,
    /// The return item loses its `.name` property.
    BareReturn,
    /// A variable-length marker on the first relation.
    Asterisk,
    /// The last node of the first path is cut off.
    TruncatedPath,
}

impl Mutation {
    pub const REPAIRABLE: [Mutation; 3] = [Mutation::WrongLabel, Mutation::ReversedDirection, Mutation::BareReturn];
    pub const UNREPAIRABLE: [Mutation; 2] = [Mutation::Asterisk, Mutation::TruncatedPath];

    pub fn is_repairable(self) -> bool {
        Self::REPAIRABLE.contains(&self)
    }
}

/// Applies `mutation` to a canonical gold query. Returns `None` when the
/// query offers no place for it (no anchor, or only same-label relations
/// for a reversal) or is not parseable.
pub fn mutate_query(gold: &str, mutation: Mutation, schema: &GraphSchema) -> Option<String> {
    let mut q = parse_query(gold).ok()?;
    match mutation {
        Mutation::WrongLabel => {
            let at = q.node_refs().into_iter().find(|&r| q.node(r).name.is_some() && q.node(r).label.is_some())?;
            let current = q.node(at).label.clone()?;
            let other = schema.node_labels.iter().find(|l| **l != current)?.clone();
            q.node_mut(at).label = Some(other);
            Some(serialize_query(&q))
        }
        Mutation::ReversedDirection => {
            flip_first_cross_label_rel(&mut q)?;
            Some(serialize_query(&q))
        }
        Mutation::BareReturn => {
            let item = q.return_items.first_mut()?;
            item.property = None;
            Some(serialize_query(&q))
        }
        Mutation::Asterisk => {
            let text = serialize_query(&q);
            let at = text.find("]-")?;
            Some(format!("{}*{}", &text[..at], &text[at..]))
        }
        Mutation::TruncatedPath => {
            let text = serialize_query(&q);
            let (first_line, rest) = text.split_once('\n')?;
            let first_path = first_line.split(", ").next()?;
            if !first_path.contains("]-") {
                return None;
            }
            let cut = first_path.rfind('(')?;
            Some(format!("{}\n{rest}", &first_line[..cut]))
        }
    }
}

/// Mutates `gold` with `preferred`, falling back to the other mutations of
/// the same class (repairable or not) when `preferred` does not apply.
/// Returns the mutation used and the damaged query.
pub fn mutate_with_fallback(gold: &str, preferred: Mutation, schema: &GraphSchema) -> Option<(Mutation, String)> {
    let class: &[Mutation] = if preferred.is_repairable() { &Mutation::REPAIRABLE } else { &Mutation::UNREPAIRABLE };
    let start = class.iter().position(|m| *m == preferred).unwrap_or(0);
    (0..class.len())
        .map(|k| class[(start + k) % class.len()])
        .find_map(|m| mutate_query(gold, m, schema).map(|q| (m, q)))
}

/// Which items of an oracle transcript get damaged, and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectPlan {
    /// Gold queries verbatim.
    #[default]
    None,
    /// Every item gets one repairable defect, cycling through the kinds.
    Repairable,
    /// Like `Repairable`, except every fifth item gets an unrepairable one.
    Mixed,
}

impl DefectPlan {
    pub fn mutation_for(self, item_index: usize) -> Option<Mutation> {
        let repairable = Mutation::REPAIRABLE[item_index % Mutation::REPAIRABLE.len()];
        match self {
            DefectPlan::None => None,
            DefectPlan::Repairable => Some(repairable),
            DefectPlan::Mixed if item_index % 5 == 4 => {
                Some(Mutation::UNREPAIRABLE[(item_index / 5) % Mutation::UNREPAIRABLE.len()])
            }
            DefectPlan::Mixed => Some(repairable),
        }
    }
}

/// The oracle's reply for one gold query under `plan`, plus the mutation
/// actually applied. Falls back to the undamaged query when no mutation of
/// the planned class fits.
pub fn oracle_reply(
    gold: &str,
    item_index: usize,
    plan: DefectPlan,
    schema: &GraphSchema,
) -> (Option<Mutation>, String) {
    match plan.mutation_for(item_index).and_then(|m| mutate_with_fallback(gold, m, schema)) {
        Some((m, q)) => (Some(m), as_llm_reply(&q)),
        None => (None, as_llm_reply(gold)),
    }
}

/// Records one oracle reply per (configuration, item) into `store`, keyed by
/// the exact prompt the pipeline will render. Items without a gold query are
/// skipped; the return value counts them.
pub fn record_oracle_transcripts(
    store: &TranscriptStore,
    kb: &KnowledgeBase,
    items: &[BenchmarkItem],
    runs: &[RunConfig],
    plan: DefectPlan,
) -> Result<usize, TranscriptError> {
    let mut skipped = 0;
    for run in runs {
        for (i, item) in items.iter().enumerate() {
            let Some(gold) = &item.gold_cypher else {
                skipped += 1;
                continue;
            };
            let prompt = render_prompt(&run.template, &kb.schema_text, &item.question);
            let (_, reply) = oracle_reply(gold, i, plan, &kb.schema);
            store.record(&run.llm.model_name, &prompt, &reply)?;
        }
    }
    Ok(skipped)
}

/// Wraps a query the way chat models tend to answer: a short lead-in and a
/// fenced block.
pub fn as_llm_reply(query: &str) -> String {
    format!("Here is the Cypher query:\n```cypher\n{query}\n```")
}

fn flip_first_cross_label_rel(q: &mut CypherQuery) -> Option<()> {
    let label = |q: &CypherQuery, n: &NodePattern| {
        n.label.clone().or_else(|| n.variable.as_deref().and_then(|v| q.label_of_variable(v)).map(str::to_string))
    };
    for p in 0..q.patterns.len() {
        for h in 0..q.patterns[p].hops.len() {
            let path = &q.patterns[p];
            let (a, b) = (label(q, path.node(h)), label(q, path.node(h + 1)));
            if a.is_some() && b.is_some() && a != b {
                let rel = &mut q.patterns[p].hops[h].0;
                rel.direction = rel.direction.flipped();
                return Some(());
            }
        }
    }
    None
}
