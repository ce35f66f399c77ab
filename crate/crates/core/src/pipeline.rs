//! One question end to end: prompt, completion, extraction, repair,
//! execution and (optionally) an answer sentence, all captured in a
//! [`PipelineTrace`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checker::{check_and_repair, RepairReport};
use crate::cypher::extract_cypher_block;
use crate::graph::{
    apply_transforms, build_entity_index, derive_schema, execute_query, load_graph, render_schema_text, EntityIndex,
    GraphError, GraphFormat, GraphSchema, PropertyGraph, TransformConfig,
};
use crate::llm::{render_prompt, AnswerTemplate, LlmConfig, LlmError, LlmGateway, PromptTemplate};

/// A graph with everything derived from it that the pipeline needs.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    pub graph: PropertyGraph,
    pub schema: GraphSchema,
    pub schema_text: String,
    pub index: EntityIndex,
}

impl KnowledgeBase {
    pub fn new(graph: PropertyGraph) -> Self {
        let schema = derive_schema(&graph);
        let schema_text = render_schema_text(&schema);
        let index = build_entity_index(&graph);
        Self { graph, schema, schema_text, index }
    }

    /// Loads a graph (format detected from the path) and applies the
    /// optional transform config. Transform warnings are logged.
    pub fn load(graph_path: &Path, transforms: Option<&Path>) -> Result<Self, GraphError> {
        let mut graph = load_graph(graph_path, GraphFormat::detect(graph_path))?;
        if let Some(path) = transforms {
            let out = apply_transforms(&graph, &TransformConfig::load(path)?)?;
            for w in &out.warnings {
                log::warn!("{w}");
            }
            graph = out.graph;
        }
        Ok(Self::new(graph))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Llm,
    Extract,
    Check,
    Execute,
    Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub question: String,
    pub template_id: String,
    pub model_name: String,
    pub rendered_prompt: String,
    pub raw_llm_output: Option<String>,
    pub extracted_cypher: Option<String>,
    pub repair_report: Option<RepairReport>,
    pub executed_query: Option<String>,
    pub columns: Vec<String>,
    pub results: Vec<String>,
    pub answer_sentence: Option<String>,
    pub failure: Option<StageFailure>,
}

impl PipelineTrace {
    fn fail(mut self, stage: Stage, message: impl Into<String>) -> Self {
        self.failure = Some(StageFailure { stage, message: message.into() });
        self
    }

    /// The completion backend itself failed (as opposed to its output).
    pub fn is_backend_failure(&self) -> bool {
        matches!(&self.failure, Some(f) if matches!(f.stage, Stage::Llm | Stage::Sentence))
    }
}

/// What a run needs besides the question.
#[derive(Debug, Clone, Copy)]
pub struct PipelineParams<'a> {
    pub llm: &'a LlmConfig,
    pub template: &'a PromptTemplate,
    /// `None` skips the sentence step.
    pub sentence: Option<&'a AnswerTemplate>,
}

pub fn answer_question(
    question: &str,
    kb: &KnowledgeBase,
    gateway: &LlmGateway,
    params: PipelineParams<'_>,
) -> PipelineTrace {
    let rendered_prompt = render_prompt(params.template, &kb.schema_text, question);
    let mut trace = PipelineTrace {
        question: question.to_string(),
        template_id: params.template.id.clone(),
        model_name: params.llm.model_name.clone(),
        rendered_prompt,
        raw_llm_output: None,
        extracted_cypher: None,
        repair_report: None,
        executed_query: None,
        columns: Vec::new(),
        results: Vec::new(),
        answer_sentence: None,
        failure: None,
    };

    let raw = match gateway.complete(params.llm, &trace.rendered_prompt) {
        Ok(raw) => raw,
        Err(e) => return trace.fail(Stage::Llm, e.to_string()),
    };
    let extracted = extract_cypher_block(&raw);
    trace.raw_llm_output = Some(raw);
    let extracted = match extracted {
        Ok(text) => text,
        Err(e) => return trace.fail(Stage::Extract, e.to_string()),
    };
    trace.extracted_cypher = Some(extracted.clone());

    let report = check_and_repair(&extracted, &kb.schema, &kb.index);
    let query = report.query.clone();
    let defects: Vec<String> = report.unresolved.iter().map(|d| format!("{:?}: {}", d.kind, d.detail)).collect();
    let output_query = report.output_query.clone();
    trace.repair_report = Some(report);
    let Some(query) = query.filter(|_| defects.is_empty()) else {
        return trace.fail(Stage::Check, defects.join("; "));
    };

    let result = match execute_query(&kb.graph, &query) {
        Ok(r) => r,
        Err(e) => return trace.fail(Stage::Execute, e.to_string()),
    };
    trace.executed_query = Some(output_query);
    trace.results = result.flatten();
    trace.columns = result.columns;

    if let Some(answer) = params.sentence {
        match generate_answer_sentence(question, &trace.results, params.llm, answer, gateway) {
            Ok(s) => trace.answer_sentence = Some(s),
            Err(e) => return trace.fail(Stage::Sentence, e.to_string()),
        }
    }
    trace
}

pub fn generate_answer_sentence(
    question: &str,
    results: &[String],
    llm: &LlmConfig,
    template: &AnswerTemplate,
    gateway: &LlmGateway,
) -> Result<String, LlmError> {
    gateway.complete(llm, &template.render(question, results)).map(|s| s.trim().to_string())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::checker::fixtures::ms_graph;
    use crate::cypher::parse_query;
    use crate::llm::{Backend, StubConfig, StubServer, TranscriptStore};

    const FAULTY: &str = "MATCH (d:pathway {name:\"multiple sclerosis\"})-[:contraindication]->(dr:drug) RETURN dr";

    fn template() -> PromptTemplate {
        PromptTemplate::new("zero_shot", "Schema: {schema}\nQuestion: {question}").unwrap()
    }

    fn replaying(kb: &KnowledgeBase, question: &str, reply: &str) -> (LlmGateway, LlmConfig) {
        let store = TranscriptStore::in_memory();
        let prompt = render_prompt(&template(), &kb.schema_text, question);
        store.record("m", &prompt, reply).unwrap();
        (LlmGateway::replay(Arc::new(store)), LlmConfig::replay("m"))
    }

    #[test]
    fn worked_example_end_to_end() {
        let kb = KnowledgeBase::new(ms_graph());
        let q = "Which drugs are contraindicated for multiple sclerosis?";
        let (gw, llm) = replaying(&kb, q, &format!("Here you go:\n```\n{FAULTY}\n```"));
        let t = template();
        let trace = answer_question(q, &kb, &gw, PipelineParams { llm: &llm, template: &t, sentence: None });
        assert_eq!(trace.failure, None);
        assert_eq!(trace.repair_report.as_ref().unwrap().corrections.len(), 3);
        // oracle: drugs with a contraindication edge into the MS node
        let mut expected: Vec<String> = kb
            .graph
            .edges()
            .iter()
            .filter(|e| e.relation == "contraindication" && e.target == "ms")
            .map(|e| kb.graph.node_by_id(&e.source).unwrap().name.clone())
            .collect();
        expected.sort();
        assert_eq!(trace.results, expected);
        assert_eq!(trace.executed_query.as_deref(), Some(trace.repair_report.as_ref().unwrap().output_query.as_str()));
    }

    #[test]
    fn refusal_fails_at_extraction() {
        let kb = KnowledgeBase::new(ms_graph());
        let (gw, llm) = replaying(&kb, "q", "I cannot answer");
        let t = template();
        let trace = answer_question("q", &kb, &gw, PipelineParams { llm: &llm, template: &t, sentence: None });
        assert_eq!(trace.failure.as_ref().unwrap().stage, Stage::Extract);
        assert!(trace.results.is_empty() && trace.repair_report.is_none() && trace.executed_query.is_none());
    }

    #[test]
    fn perfect_query_passes_through() {
        let kb = KnowledgeBase::new(ms_graph());
        let good = "MATCH (d:disease {name:\"multiple sclerosis\"})<-[:indication]-(x:drug)\nRETURN x.name";
        let (gw, llm) = replaying(&kb, "q", good);
        let t = template();
        let trace = answer_question("q", &kb, &gw, PipelineParams { llm: &llm, template: &t, sentence: None });
        assert!(trace.repair_report.as_ref().unwrap().corrections.is_empty());
        let direct = execute_query(&kb.graph, &parse_query(good).unwrap()).unwrap().flatten();
        assert_eq!(trace.results, direct);
    }

    #[test]
    fn unresolved_defects_block_execution() {
        let kb = KnowledgeBase::new(ms_graph());
        let (gw, llm) = replaying(&kb, "q", "MATCH (d:disease)<-[:treats]-(x:drug) RETURN x.name");
        let t = template();
        let trace = answer_question("q", &kb, &gw, PipelineParams { llm: &llm, template: &t, sentence: None });
        let f = trace.failure.as_ref().unwrap();
        assert_eq!(f.stage, Stage::Check);
        assert!(f.message.contains("UnknownRelation"));
        assert!(trace.executed_query.is_none());
    }

    #[test]
    fn sentence_from_echo_stub_mentions_results() {
        let server = StubServer::start(StubConfig::default()).unwrap();
        let llm = LlmConfig::new(Backend::OpenaiCompatible, &server.url(), "echo");
        let answer = AnswerTemplate::new("Q: {question}\nResults:\n{results}").unwrap();
        let s =
            generate_answer_sentence("Which drug?", &["interferon beta-1a".into()], &llm, &answer, &LlmGateway::live())
                .unwrap();
        assert!(s.contains("interferon beta-1a"));
    }

    #[test]
    fn llm_failure_is_recorded() {
        let kb = KnowledgeBase::new(ms_graph());
        let gw = LlmGateway::replay(Arc::new(TranscriptStore::in_memory()));
        let llm = LlmConfig::replay("m");
        let t = template();
        let trace = answer_question("q", &kb, &gw, PipelineParams { llm: &llm, template: &t, sentence: None });
        assert!(trace.is_backend_failure());
        assert!(trace.raw_llm_output.is_none());
    }
}
