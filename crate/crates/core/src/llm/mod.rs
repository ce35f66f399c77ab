//! Prompt templates and completion backends.
//!
//! A [`LlmGateway`] sends a rendered prompt either to a live HTTP endpoint
//! (OpenAI-compatible chat completions or an Ollama-style generate API) or
//! answers it from a [`TranscriptStore`], keyed by [`prompt_hash`].

mod stub;
mod template;
mod transcript;

use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use stub::{StubConfig, StubReply, StubServer};
pub use template::{
    load_templates, render_prompt, AnswerTemplate, PromptTemplate, TemplateError, TemplateSet, STANDARD_TEMPLATES,
};
pub use transcript::{prompt_hash, TranscriptEntry, TranscriptError, TranscriptStore};

/// Environment variable consulted when a config carries no API key.
pub const API_KEY_ENV: &str = "LLM_API_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    OpenaiCompatible,
    Ollama,
    Replay,
}

fn default_timeout_secs() -> f64 {
    120.0
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    pub backend: Backend,
    #[serde(default)]
    pub endpoint_url: String,
    pub model_name: String,
    #[serde(default)]
    pub temperature: f64,
    /// Never serialized; falls back to `LLM_API_KEY`.
    #[serde(default, skip_serializing)]
    pub api_key: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    /// Optional system message. By default the whole prompt is sent as a
    /// single user message.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_prompt: Option<String>,
}

impl fmt::Debug for LlmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LlmConfig")
            .field("backend", &self.backend)
            .field("endpoint_url", &self.endpoint_url)
            .field("model_name", &self.model_name)
            .field("temperature", &self.temperature)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("timeout_secs", &self.timeout_secs)
            .field("max_tokens", &self.max_tokens)
            .finish()
    }
}

impl LlmConfig {
    pub fn new(backend: Backend, endpoint_url: &str, model_name: &str) -> Self {
        Self {
            backend,
            endpoint_url: endpoint_url.trim_end_matches('/').to_string(),
            model_name: model_name.to_string(),
            temperature: 0.0,
            api_key: None,
            timeout_secs: default_timeout_secs(),
            max_tokens: None,
            system_prompt: None,
        }
    }

    pub fn replay(model_name: &str) -> Self {
        Self::new(Backend::Replay, "", model_name)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.model_name.trim().is_empty() {
            return Err(LlmError::Config("model_name must be non-empty".into()));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(LlmError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(LlmError::Config("timeout_secs must be positive".into()));
        }
        if self.backend != Backend::Replay && self.endpoint_url.is_empty() {
            return Err(LlmError::Config(format!("model '{}' needs an endpoint_url", self.model_name)));
        }
        Ok(())
    }

    fn resolved_api_key(&self) -> Option<String> {
        self.api_key.clone().or_else(|| std::env::var(API_KEY_ENV).ok()).filter(|k| !k.is_empty())
    }
}

/// Reads a JSON file holding either one config object or an array of them.
pub fn load_llm_configs(path: &Path) -> Result<Vec<LlmConfig>, LlmError> {
    let text = std::fs::read_to_string(path).map_err(|e| LlmError::Config(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| LlmError::Config(format!("{}: {e}", path.display())))?;
    let configs: Vec<LlmConfig> = match value {
        Value::Array(_) => serde_json::from_value(value),
        _ => serde_json::from_value(value).map(|c| vec![c]),
    }
    .map_err(|e| LlmError::Config(format!("{}: {e}", path.display())))?;
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("network error: {0}")]
    Network(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("HTTP {code}: {body}")]
    HttpStatus { code: u16, body: String },
    #[error("unexpected response shape: {0}")]
    BadResponse(String),
    #[error("no recorded response for prompt hash {0}")]
    ReplayMiss(String),
    #[error("replay backend configured but no transcript store is loaded")]
    NoTranscriptStore,
    #[error("invalid LLM config: {0}")]
    Config(String),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
}

#[derive(Debug, Clone, Default)]
enum Mode {
    #[default]
    Live,
    Replay(Arc<TranscriptStore>),
    Record(Arc<TranscriptStore>),
}

/// Entry point for completions. Cheap to clone and shareable across threads.
#[derive(Debug, Clone, Default)]
pub struct LlmGateway {
    mode: Mode,
}

impl LlmGateway {
    pub fn live() -> Self {
        Self { mode: Mode::Live }
    }

    /// Every completion is answered from `store`, whatever the backend.
    pub fn replay(store: Arc<TranscriptStore>) -> Self {
        Self { mode: Mode::Replay(store) }
    }

    /// Live calls whose responses are appended to `store`.
    pub fn recording(store: Arc<TranscriptStore>) -> Self {
        Self { mode: Mode::Record(store) }
    }

    pub fn is_replay(&self) -> bool {
        matches!(self.mode, Mode::Replay(_))
    }

    pub fn complete(&self, config: &LlmConfig, prompt: &str) -> Result<String, LlmError> {
        let replay_store = match (&self.mode, config.backend) {
            (Mode::Replay(store), _) => Some(store),
            (Mode::Record(store), Backend::Replay) => Some(store),
            (Mode::Live, Backend::Replay) => return Err(LlmError::NoTranscriptStore),
            _ => None,
        };
        if let Some(store) = replay_store {
            let hash = prompt_hash(&config.model_name, prompt);
            return store.lookup(&hash).ok_or(LlmError::ReplayMiss(hash));
        }
        let response = complete_live(config, prompt)?;
        if let Mode::Record(store) = &self.mode {
            store.record(&config.model_name, prompt, &response)?;
        }
        Ok(response)
    }
}

/// One blocking HTTP completion against the configured backend.
pub fn complete_live(config: &LlmConfig, prompt: &str) -> Result<String, LlmError> {
    config.validate()?;
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into();
    let base = config.endpoint_url.trim_end_matches('/');
    let (url, body) = match config.backend {
        Backend::OpenaiCompatible => {
            let mut messages = Vec::new();
            if let Some(system) = &config.system_prompt {
                messages.push(json!({"role": "system", "content": system}));
            }
            messages.push(json!({"role": "user", "content": prompt}));
            let mut body = json!({
                "model": config.model_name,
                "temperature": config.temperature,
                "messages": messages,
            });
            if let Some(max) = config.max_tokens {
                body["max_tokens"] = json!(max);
            }
            (format!("{base}/v1/chat/completions"), body)
        }
        Backend::Ollama => {
            let mut options = json!({"temperature": config.temperature});
            if let Some(max) = config.max_tokens {
                options["num_predict"] = json!(max);
            }
            let mut body = json!({
                "model": config.model_name,
                "prompt": prompt,
                "stream": false,
                "options": options,
            });
            if let Some(system) = &config.system_prompt {
                body["system"] = json!(system);
            }
            (format!("{base}/api/generate"), body)
        }
        Backend::Replay => return Err(LlmError::NoTranscriptStore),
    };

    let mut request = agent.post(&url);
    if let Some(key) = config.resolved_api_key() {
        request = request.header("Authorization", &format!("Bearer {key}"));
    }
    log::debug!("POST {url} model={}", config.model_name);
    let mut response = request.send_json(&body).map_err(transport_error)?;
    let code = response.status().as_u16();
    let text = response.body_mut().read_to_string().map_err(transport_error)?;
    if !(200..300).contains(&code) {
        return Err(LlmError::HttpStatus { code, body: text });
    }
    let value: Value = serde_json::from_str(&text).map_err(|e| LlmError::BadResponse(e.to_string()))?;
    let content = match config.backend {
        Backend::OpenaiCompatible => value.pointer("/choices/0/message/content"),
        _ => value.get("response"),
    };
    content
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| LlmError::BadResponse(format!("no completion text in {}", truncate(&text, 200))))
}

fn transport_error(e: ureq::Error) -> LlmError {
    match e {
        ureq::Error::Timeout(t) => LlmError::Timeout(t.to_string()),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => LlmError::Timeout(io.to_string()),
        other => LlmError::Network(other.to_string()),
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stub(reply: StubReply) -> StubServer {
        StubServer::start(StubConfig { reply, ..Default::default() }).unwrap()
    }

    #[test]
    fn openai_request_and_reply_shape() {
        let server = stub(StubReply::Echo);
        let mut cfg = LlmConfig::new(Backend::OpenaiCompatible, &server.url(), "gpt-test");
        cfg.api_key = Some("secret".into());
        let out = complete_live(&cfg, "hello there").unwrap();
        assert_eq!(out, "hello there");
        let req = server.last_request().unwrap();
        assert_eq!(req.path, "/v1/chat/completions");
        assert_eq!(req.authorization.as_deref(), Some("Bearer secret"));
        assert_eq!(req.body["model"], "gpt-test");
        assert_eq!(req.body["temperature"], 0.0);
        assert_eq!(req.body["messages"][0]["role"], "user");
        assert!(!format!("{cfg:?}").contains("secret"));
    }

    #[test]
    fn ollama_request_and_reply_shape() {
        let server = stub(StubReply::Echo);
        let cfg = LlmConfig::new(Backend::Ollama, &server.url(), "llama3:70b");
        assert_eq!(complete_live(&cfg, "ping").unwrap(), "ping");
        let req = server.last_request().unwrap();
        assert_eq!(req.path, "/api/generate");
        assert_eq!(req.body["stream"], false);
        assert_eq!(req.body["options"]["temperature"], 0.0);
    }

    #[test]
    fn live_calls_are_repeatable() {
        let server =
            stub(StubReply::Rules(vec![("sclerosis".into(), "MATCH (a) RETURN a.name".into())], "none".into()));
        let cfg = LlmConfig::new(Backend::OpenaiCompatible, &server.url(), "m");
        let a = complete_live(&cfg, "about multiple sclerosis").unwrap();
        let b = complete_live(&cfg, "about multiple sclerosis").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, "MATCH (a) RETURN a.name");
        assert_eq!(complete_live(&cfg, "other").unwrap(), "none");
    }

    #[test]
    fn errors_are_distinguishable() {
        let server = stub(StubReply::Status(503, "overloaded".into()));
        let cfg = LlmConfig::new(Backend::OpenaiCompatible, &server.url(), "m");
        match complete_live(&cfg, "x") {
            Err(LlmError::HttpStatus { code: 503, body }) => assert_eq!(body, "overloaded"),
            other => panic!("{other:?}"),
        }

        let slow = StubServer::start(StubConfig { delay: Duration::from_millis(1500), ..Default::default() }).unwrap();
        let mut cfg = LlmConfig::new(Backend::OpenaiCompatible, &slow.url(), "m");
        cfg.timeout_secs = 0.2;
        assert!(matches!(complete_live(&cfg, "x"), Err(LlmError::Timeout(_))), "expected timeout");

        // nothing listens on a freshly closed port
        let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let cfg = LlmConfig::new(Backend::Ollama, &format!("http://127.0.0.1:{port}"), "m");
        assert!(matches!(complete_live(&cfg, "x"), Err(LlmError::Network(_))));

        let gw = LlmGateway::replay(Arc::new(TranscriptStore::in_memory()));
        match gw.complete(&LlmConfig::replay("m"), "p") {
            Err(LlmError::ReplayMiss(h)) => assert_eq!(h, prompt_hash("m", "p")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn replay_returns_stored_bytes_without_network() {
        let store = Arc::new(TranscriptStore::in_memory());
        store.record("m", "p", "MATCH (x)\r\nRETURN x.name  ").unwrap();
        // an unreachable endpoint proves no request is made
        let cfg = LlmConfig::new(Backend::OpenaiCompatible, "http://127.0.0.1:9", "m");
        let out = LlmGateway::replay(store).complete(&cfg, "p").unwrap();
        assert_eq!(out, "MATCH (x)\r\nRETURN x.name  ");
    }

    #[test]
    fn recording_persists_live_reply() {
        let server = stub(StubReply::Echo);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rec.jsonl");
        let gw = LlmGateway::recording(Arc::new(TranscriptStore::open_for_append(&path).unwrap()));
        let cfg = LlmConfig::new(Backend::Ollama, &server.url(), "m");
        assert_eq!(gw.complete(&cfg, "abc").unwrap(), "abc");
        let replayed = LlmGateway::replay(Arc::new(TranscriptStore::open(&path).unwrap()));
        assert_eq!(replayed.complete(&LlmConfig::replay("m"), "abc").unwrap(), "abc");
    }

    #[test]
    fn config_validation() {
        let mut c = LlmConfig::new(Backend::OpenaiCompatible, "http://x", "m");
        c.temperature = -0.5;
        assert!(c.validate().is_err());
        let parsed: LlmConfig =
            serde_json::from_str(r#"{"backend":"ollama","endpoint_url":"http://h:11434","model_name":"llama3:70b"}"#)
                .unwrap();
        assert_eq!(parsed.temperature, 0.0);
        assert_eq!(parsed.timeout_secs, 120.0);
        assert!(LlmConfig::new(Backend::Ollama, "", "m").validate().is_err());
    }
}
