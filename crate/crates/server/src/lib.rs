//! JSON-over-HTTP API for the question-answering pipeline.
//!
//! | Method | Path             | Body / result                                   |
//! |--------|------------------|-------------------------------------------------|
//! | POST   | `/api/ask`       | [`AskRequest`] → `PipelineTrace`                |
//! | POST   | `/api/execute`   | `{"cypher": ...}` → [`ExecuteResponse`]         |
//! | GET    | `/api/schema`    | schema text, labels and relation triples        |
//! | GET    | `/api/templates` | `[{"id", "body"}]`                              |
//! | GET    | `/api/models`    | `[{"model_name", "backend"}]`                   |
//! | GET    | `/api/health`    | `{"status": "ok", "graph_nodes": N}`            |
//!
//! Errors are `{"error": "..."}` objects. All shared state is read-only;
//! the transcript store behind a recording gateway is the only writer.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use graphqa_core::checker::{validate, UnresolvedDefect};
use graphqa_core::cypher::{parse_query, serialize_query};
use graphqa_core::graph::{execute_query, RelationTriple};
use graphqa_core::llm::{Backend, LlmConfig, LlmGateway, TemplateSet};
use graphqa_core::pipeline::{answer_question, KnowledgeBase, PipelineParams};

/// Everything a request may read. Built once at startup.
pub struct AppState {
    pub kb: KnowledgeBase,
    pub templates: TemplateSet,
    pub models: Vec<LlmConfig>,
    pub gateway: LlmGateway,
}

#[derive(Debug, Clone, Default)]
pub struct ServerOptions {
    /// Allowed browser origin. `None` allows any origin.
    pub cors_origin: Option<String>,
    /// Directory of built UI assets served for non-API paths.
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AskRequest {
    pub question: String,
    /// Configured model name. May be omitted when exactly one model is
    /// configured.
    #[serde(default)]
    pub model: Option<String>,
    pub template_id: String,
    #[serde(default)]
    pub generate_sentence: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecuteRequest {
    pub cypher: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecuteResponse {
    /// Canonical form of the submitted query.
    pub query: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Rows flattened the same way pipeline traces report them.
    pub results: Vec<String>,
    /// Schema problems found in the query. The query still ran as written.
    pub diagnostics: Vec<UnresolvedDefect>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaResponse {
    pub text: String,
    pub labels: Vec<String>,
    pub triples: Vec<RelationTriple>,
    pub self_bidirectional: Vec<String>,
}

struct ApiError(StatusCode, serde_json::Value);

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self(StatusCode::BAD_REQUEST, json!({ "error": message.into() }))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Arc<AppState>, options: &ServerOptions) -> Router {
    let cors = match &options.cors_origin {
        Some(origin) => match HeaderValue::from_str(origin) {
            Ok(v) => CorsLayer::new().allow_origin(v),
            Err(_) => {
                log::warn!("ignoring invalid CORS origin {origin:?}");
                CorsLayer::new()
            }
        },
        None => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    let api = Router::new()
        .route("/api/ask", post(ask))
        .route("/api/execute", post(execute))
        .route("/api/schema", get(schema))
        .route("/api/templates", get(templates))
        .route("/api/models", get(models))
        .route("/api/health", get(health))
        .with_state(state);
    let app = match &options.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Serves `router` on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, router: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router).await
}

async fn ask(State(state): State<Shared>, body: Result<Json<AskRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    if req.question.trim().is_empty() {
        return Err(ApiError::bad_request("question must not be empty"));
    }
    if state.templates.get(&req.template_id).is_none() {
        return Err(ApiError::bad_request(format!(
            "unknown template_id '{}'; valid ids: {}",
            req.template_id,
            state.templates.ids().join(", ")
        )));
    }
    let model_index = match req.model.as_deref() {
        Some(name) => state.models.iter().position(|m| m.model_name == name),
        None if state.models.len() == 1 => Some(0),
        None => None,
    };
    let Some(model_index) = model_index else {
        let names: Vec<&str> = state.models.iter().map(|m| m.model_name.as_str()).collect();
        return Err(ApiError::bad_request(format!(
            "unknown model {:?}; configured models: {}",
            req.model.unwrap_or_default(),
            names.join(", ")
        )));
    };

    let trace = tokio::task::spawn_blocking(move || {
        let template = state.templates.get(&req.template_id).expect("checked above");
        let params = PipelineParams {
            llm: &state.models[model_index],
            template,
            sentence: req.generate_sentence.then_some(&state.templates.answer),
        };
        answer_question(&req.question, &state.kb, &state.gateway, params)
    })
    .await
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": e.to_string() })))?;

    let status = if trace.is_backend_failure() { StatusCode::BAD_GATEWAY } else { StatusCode::OK };
    Ok((status, Json(trace)).into_response())
}

async fn execute(
    State(state): State<Shared>,
    body: Result<Json<ExecuteRequest>, JsonRejection>,
) -> Result<Json<ExecuteResponse>, ApiError> {
    let Json(req) = body?;
    let query = parse_query(&req.cypher).map_err(|e| {
        ApiError(
            StatusCode::UNPROCESSABLE_ENTITY,
            json!({ "error": e.to_string(), "kind": "parse", "line": e.line, "column": e.column, "offset": e.offset }),
        )
    })?;
    let result = execute_query(&state.kb.graph, &query).map_err(|e| {
        ApiError(StatusCode::UNPROCESSABLE_ENTITY, json!({ "error": e.to_string(), "kind": "execution" }))
    })?;
    Ok(Json(ExecuteResponse {
        query: serialize_query(&query),
        results: result.flatten(),
        columns: result.columns,
        rows: result.rows,
        diagnostics: validate(&query, &state.kb.schema, &state.kb.index),
    }))
}

async fn schema(State(state): State<Shared>) -> Json<SchemaResponse> {
    let s = &state.kb.schema;
    Json(SchemaResponse {
        text: state.kb.schema_text.clone(),
        labels: s.node_labels.iter().cloned().collect(),
        triples: s.relation_triples.iter().cloned().collect(),
        self_bidirectional: s.self_bidirectional.iter().cloned().collect(),
    })
}

async fn templates(State(state): State<Shared>) -> Json<serde_json::Value> {
    let list: Vec<_> = state.templates.cypher.iter().map(|t| json!({ "id": t.id, "body": t.body })).collect();
    Json(json!(list))
}

async fn models(State(state): State<Shared>) -> Json<serde_json::Value> {
    let list: Vec<_> = state
        .models
        .iter()
        .map(|m| {
            let backend = if state.gateway.is_replay() { Backend::Replay } else { m.backend };
            json!({ "model_name": m.model_name, "backend": backend })
        })
        .collect();
    Json(json!(list))
}

async fn health(State(state): State<Shared>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "graph_nodes": state.kb.graph.node_count() }))
}
