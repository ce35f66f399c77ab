use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use graphqa_core::fixture::{generate_fixture, DEFAULT_SEED};
use graphqa_core::llm::{render_prompt, LlmConfig, LlmGateway, TemplateSet, TranscriptStore};
use graphqa_core::pipeline::KnowledgeBase;
use graphqa_server::{router, AppState, ServerOptions};

const QUESTION: &str = "Which drugs are contraindicated for multiple sclerosis?";
const FAULTY: &str = "MATCH (d:pathway {name:\"multiple sclerosis\"})-[:contraindication]->(dr:drug) RETURN dr";
const CORRECTED: &str =
    "MATCH (d:disease {name:\"multiple sclerosis\"})<-[:contraindication]-(dr:drug)\nRETURN dr.name";
const MODEL: &str = "gpt-4-turbo";

fn app_with(options: ServerOptions) -> (Router, Arc<AppState>) {
    let kb = KnowledgeBase::new(generate_fixture(DEFAULT_SEED).graph);
    let templates = TemplateSet::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../templates")).unwrap();
    let store = Arc::new(TranscriptStore::in_memory());
    let prompt = render_prompt(templates.get("zero_shot").unwrap(), &kb.schema_text, QUESTION);
    store.record(MODEL, &prompt, &format!("```cypher\n{FAULTY}\n```")).unwrap();
    let state = Arc::new(AppState {
        kb,
        templates,
        models: vec![LlmConfig::replay(MODEL), LlmConfig::replay("llama3:70b")],
        gateway: LlmGateway::replay(store),
    });
    (router(state.clone(), &options), state)
}

fn app() -> (Router, Arc<AppState>) {
    app_with(ServerOptions::default())
}

async fn call(app: &Router, method: &str, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(path);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let res = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn ask_body(question: &str, template: &str) -> Value {
    json!({ "question": question, "model": MODEL, "template_id": template })
}

/// Contraindicated drugs for MS, read straight off the edge list.
fn expected_drugs(state: &AppState) -> BTreeSet<String> {
    let g = &state.kb.graph;
    g.edges()
        .iter()
        .filter(|e| e.relation == "contraindication")
        .filter(|e| g.node_by_id(&e.target).unwrap().name == "multiple sclerosis")
        .map(|e| g.node_by_id(&e.source).unwrap().name.clone())
        .collect()
}

#[tokio::test]
async fn health_reports_node_count() {
    let (app, state) = app();
    let (status, body) = call(&app, "GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "status": "ok", "graph_nodes": state.kb.graph.node_count() }));
}

#[tokio::test]
async fn ask_returns_faulty_and_corrected_queries() {
    let (app, state) = app();
    let (status, trace) = call(&app, "POST", "/api/ask", Some(ask_body(QUESTION, "zero_shot"))).await;
    assert_eq!(status, StatusCode::OK, "{trace}");
    let report = &trace["repair_report"];
    assert_eq!(report["input_query"], FAULTY);
    assert_eq!(report["output_query"], CORRECTED);
    let stages: Vec<&str> =
        report["corrections"].as_array().unwrap().iter().map(|c| c["stage"].as_str().unwrap()).collect();
    assert_eq!(stages, ["SyntaxReturn", "NodeType", "RelationDirection"]);
    let results: BTreeSet<String> =
        trace["results"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert_eq!(results, expected_drugs(&state));
    assert!(trace["failure"].is_null());

    // the same query through /api/execute gives the same rows
    let (status, exec) = call(&app, "POST", "/api/execute", Some(json!({ "cypher": trace["executed_query"] }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(exec["results"], trace["results"]);
    assert_eq!(exec["query"], CORRECTED);
    assert_eq!(exec["diagnostics"], json!([]));
}

#[tokio::test]
async fn ask_is_idempotent_in_replay_mode() {
    let (app, _) = app();
    let a = call(&app, "POST", "/api/ask", Some(ask_body(QUESTION, "zero_shot"))).await;
    let b = call(&app, "POST", "/api/ask", Some(ask_body(QUESTION, "zero_shot"))).await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn invalid_ask_requests_are_rejected() {
    let (app, _) = app();
    let (status, body) = call(&app, "POST", "/api/ask", Some(ask_body("  ", "zero_shot"))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("empty"));

    let (status, body) = call(&app, "POST", "/api/ask", Some(ask_body(QUESTION, "nope"))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let msg = body["error"].as_str().unwrap();
    assert!(msg.contains("nope") && msg.contains("zero_shot") && msg.contains("few_shot"), "{msg}");

    let req = json!({ "question": QUESTION, "model": "gpt-5", "template_id": "zero_shot" });
    let (status, body) = call(&app, "POST", "/api/ask", Some(req)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("llama3:70b"));

    // two models configured, so the model may not be left out
    let req = json!({ "question": QUESTION, "template_id": "zero_shot" });
    assert_eq!(call(&app, "POST", "/api/ask", Some(req)).await.0, StatusCode::BAD_REQUEST);

    let (status, _) = call(&app, "POST", "/api/ask", Some(json!({ "question": 3 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn backend_failure_is_bad_gateway_with_trace() {
    let (app, _) = app();
    let (status, trace) =
        call(&app, "POST", "/api/ask", Some(ask_body("Something never recorded?", "zero_shot"))).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(trace["failure"]["stage"], "llm");
    assert!(trace["repair_report"].is_null());
}

#[tokio::test]
async fn execute_diagnostics() {
    let (app, _) = app();
    let asterisk = "MATCH (a:drug)-[:contraindication*]->(b:disease) RETURN b.name";
    let (status, body) = call(&app, "POST", "/api/execute", Some(json!({ "cypher": asterisk }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["kind"], "parse");
    assert!(body["error"].as_str().unwrap().contains('*'), "{body}");

    let unbound = "MATCH (a:drug) RETURN b.name";
    let (status, body) = call(&app, "POST", "/api/execute", Some(json!({ "cypher": unbound }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["kind"], "execution");

    // runs as written, but the wrong direction is reported
    let (status, body) = call(&app, "POST", "/api/execute", Some(json!({ "cypher": FAULTY }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["results"], json!([]));
    let kinds: Vec<&str> =
        body["diagnostics"].as_array().unwrap().iter().map(|d| d["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"UnknownEntity") && kinds.contains(&"UnboundReturnVariable"), "{kinds:?}");
}

#[tokio::test]
async fn introspection_endpoints() {
    let (app, state) = app();
    let (_, schema) = call(&app, "GET", "/api/schema", None).await;
    assert_eq!(schema["labels"].as_array().unwrap().len(), 10);
    assert_eq!(schema["text"], state.kb.schema_text);
    assert!(schema["triples"]
        .as_array()
        .unwrap()
        .contains(&json!({ "source": "drug", "relation": "contraindication", "target": "disease" })));

    let (_, templates) = call(&app, "GET", "/api/templates", None).await;
    let ids: Vec<&str> = templates.as_array().unwrap().iter().map(|t| t["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 8);
    assert!(ids.contains(&"llama3_custom"));

    let (_, models) = call(&app, "GET", "/api/models", None).await;
    assert_eq!(
        models,
        json!([
            { "model_name": MODEL, "backend": "replay" },
            { "model_name": "llama3:70b", "backend": "replay" },
        ])
    );
}

#[tokio::test]
async fn graph_is_unchanged_by_requests() {
    let (app, state) = app();
    let before = state.kb.graph.clone();
    call(&app, "POST", "/api/ask", Some(ask_body(QUESTION, "zero_shot"))).await;
    call(&app, "POST", "/api/execute", Some(json!({ "cypher": CORRECTED }))).await;
    assert_eq!(state.kb.graph, before);
}

#[tokio::test]
async fn cors_origin_is_configurable() {
    let (app, _) = app_with(ServerOptions { cors_origin: Some("http://localhost:5173".into()), static_dir: None });
    let req = Request::builder()
        .uri("/api/health")
        .header(header::ORIGIN, "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert_eq!(res.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "http://localhost:5173");
}

#[tokio::test]
async fn static_assets_served_outside_api() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>console</h1>").unwrap();
    let (app, _) = app_with(ServerOptions { cors_origin: None, static_dir: Some(dir.path().to_path_buf()) });
    let res = app.oneshot(Request::builder().uri("/index.html").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(res.status(), StatusCode::OK);
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    assert_eq!(&bytes[..], b"<h1>console</h1>");
}
