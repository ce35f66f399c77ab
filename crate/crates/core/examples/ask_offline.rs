//! Answers one fixture question without a network: the model's reply is
//! recorded into an in-memory transcript first and then replayed.
//!
//!     cargo run -p graphqa-core --example ask_offline

use std::path::Path;
use std::sync::Arc;

use graphqa_core::fixture::as_llm_reply;
use graphqa_core::llm::{render_prompt, LlmConfig, LlmGateway, TemplateSet, TranscriptStore};
use graphqa_core::pipeline::{answer_question, KnowledgeBase, PipelineParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let kb = KnowledgeBase::load(&root.join("data/graph"), Some(&root.join("data/transforms.json")))?;
    let templates = TemplateSet::load(&root.join("templates"))?;
    let template = templates.get("zero_shot").expect("shipped template");

    let question = "What are the names of the drugs contraindicated for multiple sclerosis?";
    // a reply with the direction reversed and a bare RETURN, as models often write it
    let reply = as_llm_reply(r#"MATCH (a:disease {name:"multiple sclerosis"})-[:contraindication]->(b:drug) RETURN b"#);

    let store = TranscriptStore::in_memory();
    store.record("example-model", &render_prompt(template, &kb.schema_text, question), &reply)?;
    let llm = LlmConfig::replay("example-model");
    let gateway = LlmGateway::replay(Arc::new(store));

    let trace = answer_question(question, &kb, &gateway, PipelineParams { llm: &llm, template, sentence: None });
    println!("{}", serde_json::to_string_pretty(&trace)?);
    Ok(())
}
