use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{BenchmarkError, BenchmarkReport, QuestionOutcome, Tally};
use crate::pipeline::PipelineTrace;

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' }).collect()
}

/// `traces/<model>__<template>/<id>.json`, with unsafe characters replaced.
pub fn trace_path(model: &str, template: &str, id: &str) -> String {
    format!("traces/{}__{}/{}.json", sanitize(model), sanitize(template), sanitize(id))
}

#[derive(Serialize)]
struct TraceFile<'a> {
    id: &'a str,
    correct: bool,
    raw_correct: bool,
    corrected_by_checker: bool,
    trace: Option<&'a PipelineTrace>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> BenchmarkError + '_ {
    move |source| BenchmarkError::Io { path: path.to_path_buf(), source }
}

fn write(path: &Path, contents: &str) -> Result<(), BenchmarkError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io(parent))?;
    }
    std::fs::write(path, contents).map_err(io(path))
}

/// Writes results.csv, summary.md, summary.json and one trace file per
/// question under `out_dir`. Output contains no timestamps, so identical
/// reports give identical bytes.
pub fn emit_report(reports: &[BenchmarkReport], out_dir: &Path) -> Result<(), BenchmarkError> {
    if reports.is_empty() {
        return Err(BenchmarkError::NoConfigs);
    }
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["id", "model", "template", "correct", "corrected_by_checker"])?;
    for r in reports {
        for q in &r.per_question {
            let (correct, fixed) = (q.correct.to_string(), q.corrected_by_checker.to_string());
            csv.write_record([q.id.as_str(), &r.model_name, &r.template_id, &correct, &fixed])?;
        }
    }
    let bytes = csv.into_inner().map_err(|e| BenchmarkError::Csv(e.into_error().into()))?;
    write(&out_dir.join("results.csv"), &String::from_utf8_lossy(&bytes))?;

    write(&out_dir.join("summary.md"), &render_summary_markdown(reports))?;
    let json = serde_json::to_string_pretty(reports).expect("reports serialize");
    write(&out_dir.join("summary.json"), &(json + "\n"))?;

    for r in reports {
        for q in &r.per_question {
            write_trace(out_dir, q)?;
        }
    }
    Ok(())
}

fn write_trace(out_dir: &Path, q: &QuestionOutcome) -> Result<(), BenchmarkError> {
    let file = TraceFile {
        id: &q.id,
        correct: q.correct,
        raw_correct: q.raw_correct,
        corrected_by_checker: q.corrected_by_checker,
        trace: q.pipeline.as_ref(),
    };
    let json = serde_json::to_string_pretty(&file).expect("traces serialize");
    write(&out_dir.join(&q.trace), &(json + "\n"))
}

fn pct(t: Tally) -> String {
    if t.total == 0 {
        "–".into()
    } else {
        format!("{}/{} ({:.1}%)", t.correct, t.total, 100.0 * t.correct as f64 / t.total as f64)
    }
}

fn cell(reports: &[BenchmarkReport], model: &str, template: &str) -> String {
    reports
        .iter()
        .find(|r| r.model_name == model && r.template_id == template)
        .map_or_else(|| "–".to_string(), |r| r.totals.correct.to_string())
}

/// Markdown tables: totals, accuracy by hop count, checker corrections, the
/// zero/one/few-shot comparison and the prompt-variant comparison.
pub fn render_summary_markdown(reports: &[BenchmarkReport]) -> String {
    let mut models: Vec<&str> = Vec::new();
    for r in reports {
        if !models.contains(&r.model_name.as_str()) {
            models.push(&r.model_name);
        }
    }
    let hops: BTreeSet<u8> = reports.iter().flat_map(|r| r.per_hop.keys().copied()).collect();

    let mut md = String::from("# Benchmark summary\n\n## Correct answers per configuration\n\n");
    md.push_str("| LLM | Template | Correct | Total | Accuracy |\n|---|---|---:|---:|---:|\n");
    for r in reports {
        let acc = if r.totals.total == 0 { 0.0 } else { 100.0 * r.totals.correct as f64 / r.totals.total as f64 };
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {acc:.1}% |",
            r.model_name, r.template_id, r.totals.correct, r.totals.total
        );
    }

    md.push_str("\n## Correct answers by hop count\n\n| LLM | Template |");
    for h in &hops {
        let _ = write!(md, " {h}-hop |");
    }
    md.push_str("\n|---|---|");
    md.push_str(&"---:|".repeat(hops.len()));
    md.push('\n');
    for r in reports {
        let _ = write!(md, "| {} | {} |", r.model_name, r.template_id);
        for h in &hops {
            let _ = write!(md, " {} |", pct(r.per_hop.get(h).copied().unwrap_or_default()));
        }
        md.push('\n');
    }

    md.push_str("\n## Wrong queries corrected by the checker\n\n");
    md.push_str("| LLM | Template | Wrong before checker | Fixed by checker | Fixed |\n|---|---|---:|---:|---:|\n");
    for r in reports {
        let c = r.correction_stats;
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {:.1}% |",
            r.model_name, r.template_id, c.wrong_before_checker, c.fixed_by_checker, c.percent_fixed
        );
    }

    md.push_str("\n## n-shot comparison\n\n| LLM | Zero-shot | One-shot | Few-shot |\n|---|---:|---:|---:|\n");
    for m in &models {
        let _ = writeln!(
            md,
            "| {m} | {} | {} | {} |",
            cell(reports, m, "zero_shot"),
            cell(reports, m, "one_shot"),
            cell(reports, m, "few_shot")
        );
    }

    md.push_str("\n## Prompt comparison\n\n| Prompt |");
    for m in &models {
        let _ = write!(md, " {m} |");
    }
    md.push_str("\n|---|");
    md.push_str(&"---:|".repeat(models.len()));
    md.push('\n');
    for (label, id) in [
        ("Standard", "zero_shot"),
        ("Simplified", "simple"),
        ("Syntax Emphasis", "syntax_emphasis"),
        ("Social Engineering", "social_engineering"),
        ("Expert Role", "expert_role"),
        ("Custom (llama3)", "llama3_custom"),
    ] {
        let _ = write!(md, "| {label} |");
        for m in &models {
            let _ = write!(md, " {} |", cell(reports, m, id));
        }
        md.push('\n');
    }
    md
}

#[cfg(test)]
mod tests {
    use super::super::{BenchmarkReport, CorrectionStats};
    use super::*;
    use std::collections::BTreeMap;

    fn report(model: &str, template: &str, correct: usize) -> BenchmarkReport {
        BenchmarkReport {
            model_name: model.into(),
            template_id: template.into(),
            totals: Tally { correct, total: 50 },
            per_hop: BTreeMap::from([(1, Tally { correct, total: 50 })]),
            correction_stats: CorrectionStats::default(),
            per_question: Vec::new(),
        }
    }

    #[test]
    fn n_shot_table_shape() {
        let reports = [
            report("gpt-4-turbo", "zero_shot", 47),
            report("gpt-4-turbo", "one_shot", 42),
            report("gpt-4-turbo", "few_shot", 42),
            report("llama3:70b", "zero_shot", 23),
        ];
        let md = render_summary_markdown(&reports);
        assert!(md.contains("| LLM | Zero-shot | One-shot | Few-shot |"));
        assert!(md.contains("| gpt-4-turbo | 47 | 42 | 42 |"));
        assert!(md.contains("| llama3:70b | 23 | – | – |"));
        assert!(md.contains("| Standard | 47 | 23 |"));
    }

    #[test]
    fn empty_report_list_is_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_report(&[], dir.path()), Err(BenchmarkError::NoConfigs)));
    }

    #[test]
    fn trace_paths_are_safe() {
        assert_eq!(trace_path("llama3:70b", "zero_shot", "q/1"), "traces/llama3_70b__zero_shot/q_1.json");
    }
}
