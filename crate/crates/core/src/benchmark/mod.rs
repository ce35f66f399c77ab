//! Question sets, scoring and the benchmark runner.

mod report;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::cypher::parse_query;
use crate::graph::execute_query;
use crate::llm::{LlmConfig, LlmGateway, PromptTemplate};
use crate::pipeline::{answer_question, KnowledgeBase, PipelineParams, PipelineTrace};

pub use report::{emit_report, render_summary_markdown, trace_path};

#[derive(Debug, thiserror::Error)]
pub enum BenchmarkError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("item '{id}': field '{field}': {message}")]
    Invalid { id: String, field: &'static str, message: String },
    #[error("benchmark file {0} holds no items")]
    Empty(PathBuf),
    #[error("no benchmark configurations to run")]
    NoConfigs,
    #[error("benchmark config: {0}")]
    Config(String),
    #[error("writing results: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkItem {
    pub id: String,
    pub question: String,
    pub structure: u8,
    pub hops: u8,
    pub expected_answers: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_cypher: Option<String>,
}

/// Hop count implied by a question structure (1 → 1, 2–3 → 2, 4–5 → 3).
pub fn hops_for_structure(structure: u8) -> Option<u8> {
    match structure {
        1 => Some(1),
        2 | 3 => Some(2),
        4 | 5 => Some(3),
        _ => None,
    }
}

impl BenchmarkItem {
    pub fn validate(&self) -> Result<(), BenchmarkError> {
        let invalid = |field, message: String| BenchmarkError::Invalid { id: self.id.clone(), field, message };
        if self.id.trim().is_empty() {
            return Err(invalid("id", "must be non-empty".into()));
        }
        if self.question.trim().is_empty() {
            return Err(invalid("question", "must be non-empty".into()));
        }
        let Some(hops) = hops_for_structure(self.structure) else {
            return Err(invalid("structure", format!("must be 1-5, got {}", self.structure)));
        };
        if self.hops != hops {
            return Err(invalid("hops", format!("structure {} has {hops} hops, got {}", self.structure, self.hops)));
        }
        if self.expected_answers.is_empty() {
            return Err(invalid("expected_answers", "must be non-empty".into()));
        }
        Ok(())
    }
}

/// Reads a JSON array of items and checks every item plus id uniqueness.
pub fn load_benchmark(path: &Path) -> Result<Vec<BenchmarkItem>, BenchmarkError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| BenchmarkError::Io { path: path.to_path_buf(), source })?;
    if text.trim().is_empty() {
        return Err(BenchmarkError::Empty(path.to_path_buf()));
    }
    let items: Vec<BenchmarkItem> =
        serde_json::from_str(&text).map_err(|source| BenchmarkError::Json { path: path.to_path_buf(), source })?;
    if items.is_empty() {
        return Err(BenchmarkError::Empty(path.to_path_buf()));
    }
    let mut seen = HashSet::new();
    for item in &items {
        item.validate()?;
        if !seen.insert(item.id.as_str()) {
            return Err(BenchmarkError::Invalid { id: item.id.clone(), field: "id", message: "duplicate id".into() });
        }
    }
    Ok(items)
}

fn normalize(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Set equality after trimming and case-folding both sides.
pub fn score_answer(actual: &[String], expected: &BTreeSet<String>) -> bool {
    let a: BTreeSet<String> = actual.iter().map(|s| normalize(s)).collect();
    let e: BTreeSet<String> = expected.iter().map(|s| normalize(s)).collect();
    a == e
}

/// Run-level settings read from the `--config` file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub models: Vec<LlmConfig>,
    pub templates: Vec<String>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

fn default_concurrency() -> usize {
    1
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self, BenchmarkError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| BenchmarkError::Io { path: path.to_path_buf(), source })?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|source| BenchmarkError::Json { path: path.to_path_buf(), source })?;
        if cfg.models.is_empty() || cfg.templates.is_empty() {
            return Err(BenchmarkError::NoConfigs);
        }
        for m in &cfg.models {
            m.validate().map_err(|e| BenchmarkError::Config(e.to_string()))?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub llm: LlmConfig,
    pub template: PromptTemplate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionOutcome {
    pub id: String,
    pub structure: u8,
    pub hops: u8,
    pub correct: bool,
    /// The extracted query, executed as written, gave the expected answers.
    pub raw_correct: bool,
    pub corrected_by_checker: bool,
    /// Path of the trace file, relative to the output directory.
    pub trace: String,
    #[serde(skip)]
    pub pipeline: Option<PipelineTrace>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrectionStats {
    pub wrong_before_checker: usize,
    pub fixed_by_checker: usize,
    pub percent_fixed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub model_name: String,
    pub template_id: String,
    pub totals: Tally,
    pub per_hop: BTreeMap<u8, Tally>,
    pub correction_stats: CorrectionStats,
    pub per_question: Vec<QuestionOutcome>,
}

impl BenchmarkReport {
    fn assemble(model_name: &str, template_id: &str, per_question: Vec<QuestionOutcome>) -> Self {
        let mut per_hop: BTreeMap<u8, Tally> = BTreeMap::new();
        let mut totals = Tally::default();
        let mut stats = CorrectionStats::default();
        for q in &per_question {
            let hop = per_hop.entry(q.hops).or_default();
            hop.total += 1;
            totals.total += 1;
            if q.correct {
                hop.correct += 1;
                totals.correct += 1;
            }
            if !q.raw_correct {
                stats.wrong_before_checker += 1;
            }
            if q.corrected_by_checker {
                stats.fixed_by_checker += 1;
            }
        }
        if stats.wrong_before_checker > 0 {
            stats.percent_fixed = 100.0 * stats.fixed_by_checker as f64 / stats.wrong_before_checker as f64;
        }
        Self {
            model_name: model_name.to_string(),
            template_id: template_id.to_string(),
            totals,
            per_hop,
            correction_stats: stats,
            per_question,
        }
    }
}

/// Scores the query as the model wrote it, before any repair.
fn raw_query_correct(trace: &PipelineTrace, kb: &KnowledgeBase, item: &BenchmarkItem) -> bool {
    let Some(raw) = &trace.extracted_cypher else { return false };
    let Ok(query) = parse_query(raw) else { return false };
    match execute_query(&kb.graph, &query) {
        Ok(result) => score_answer(&result.flatten(), &item.expected_answers),
        Err(_) => false,
    }
}

fn evaluate(item: &BenchmarkItem, config: &RunConfig, kb: &KnowledgeBase, gateway: &LlmGateway) -> QuestionOutcome {
    let params = PipelineParams { llm: &config.llm, template: &config.template, sentence: None };
    let trace = answer_question(&item.question, kb, gateway, params);
    let correct = trace.failure.is_none() && score_answer(&trace.results, &item.expected_answers);
    let raw_correct = raw_query_correct(&trace, kb, item);
    QuestionOutcome {
        id: item.id.clone(),
        structure: item.structure,
        hops: item.hops,
        correct,
        raw_correct,
        corrected_by_checker: !raw_correct && correct,
        trace: trace_path(&config.llm.model_name, &config.template.id, &item.id),
        pipeline: Some(trace),
    }
}

/// Runs every item under every configuration, `concurrency` questions at a
/// time. Per-question failures are scored as incorrect; the run itself only
/// fails on empty input.
pub fn run_benchmark(
    items: &[BenchmarkItem],
    configs: &[RunConfig],
    kb: &KnowledgeBase,
    gateway: &LlmGateway,
    concurrency: usize,
) -> Result<Vec<BenchmarkReport>, BenchmarkError> {
    if configs.is_empty() {
        return Err(BenchmarkError::NoConfigs);
    }
    if items.is_empty() {
        return Err(BenchmarkError::Empty(PathBuf::new()));
    }
    let workers = concurrency.clamp(1, items.len());
    let mut reports = Vec::with_capacity(configs.len());
    for config in configs {
        log::info!("running {} x {} ({} items)", config.llm.model_name, config.template.id, items.len());
        let slots: Vec<Mutex<Option<QuestionOutcome>>> = items.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(item) = items.get(i) else { break };
                    let outcome = evaluate(item, config, kb, gateway);
                    *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(outcome);
                });
            }
        });
        let outcomes: Vec<QuestionOutcome> = slots
            .into_iter()
            .map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()).expect("every item is evaluated"))
            .collect();
        reports.push(BenchmarkReport::assemble(&config.llm.model_name, &config.template.id, outcomes));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn scoring_rules() {
        assert!(score_answer(&strings(&["A", "A", "B"]), &set(&["a", "b"])));
        assert!(!score_answer(&[], &set(&["a"])));
        assert!(!score_answer(&strings(&["a", "b", "c"]), &set(&["a", "b"])));
        assert!(score_answer(&strings(&["  Fingolimod "]), &set(&["fingolimod"])));
    }

    fn item(structure: u8, hops: u8) -> BenchmarkItem {
        BenchmarkItem {
            id: "q1".into(),
            question: "q?".into(),
            structure,
            hops,
            expected_answers: set(&["a"]),
            gold_cypher: None,
        }
    }

    #[test]
    fn hop_consistency() {
        for (s, h) in [(1, 1), (2, 2), (3, 2), (4, 3), (5, 3)] {
            assert!(item(s, h).validate().is_ok());
        }
        let err = item(1, 3).validate().unwrap_err().to_string();
        assert!(err.contains("q1") && err.contains("hops"), "{err}");
        assert!(item(6, 3).validate().is_err());
        let mut empty = item(1, 1);
        empty.expected_answers.clear();
        assert!(empty.validate().is_err());
    }

    #[test]
    fn empty_files_rejected() {
        let dir = tempfile::tempdir().unwrap();
        for (name, body) in [("a.json", ""), ("b.json", "[]")] {
            let p = dir.path().join(name);
            std::fs::write(&p, body).unwrap();
            assert!(matches!(load_benchmark(&p), Err(BenchmarkError::Empty(_))));
        }
        let p = dir.path().join("dup.json");
        std::fs::write(&p, serde_json::to_string(&[item(1, 1), item(1, 1)]).unwrap()).unwrap();
        assert!(load_benchmark(&p).is_err());
    }

    #[test]
    fn accounting() {
        let q = |id: &str, hops, correct, raw_correct| QuestionOutcome {
            id: id.into(),
            structure: 1,
            hops,
            correct,
            raw_correct,
            corrected_by_checker: correct && !raw_correct,
            trace: String::new(),
            pipeline: None,
        };
        let r = BenchmarkReport::assemble(
            "m",
            "t",
            vec![q("a", 1, true, true), q("b", 2, true, false), q("c", 2, false, false), q("d", 3, false, false)],
        );
        assert_eq!(r.totals, Tally { correct: 2, total: 4 });
        assert_eq!(r.per_hop.values().map(|t| t.correct).sum::<usize>(), r.totals.correct);
        assert_eq!(r.correction_stats.wrong_before_checker, 3);
        assert_eq!(r.correction_stats.fixed_by_checker, 1);
        assert!((r.correction_stats.percent_fixed - 100.0 / 3.0).abs() < 1e-9);
        let none = BenchmarkReport::assemble("m", "t", vec![q("a", 1, true, true)]);
        assert_eq!(none.correction_stats.percent_fixed, 0.0);
    }
}
