//! A tiny local completion server for smoke tests. It speaks just enough
//! HTTP/1.1 to answer both the chat-completions and the generate endpoint.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::{json, Value};

#[derive(Debug, Clone, Default)]
pub enum StubReply {
    /// Reply with the prompt text itself.
    #[default]
    Echo,
    /// First rule whose needle occurs in the prompt wins, else the fallback.
    Rules(Vec<(String, String)>, String),
    /// Fail every request with this status and body.
    Status(u16, String),
}

#[derive(Debug, Clone, Default)]
pub struct StubConfig {
    pub reply: StubReply,
    /// Sleep before answering, to exercise client timeouts.
    pub delay: Duration,
    /// Bind address; defaults to an ephemeral localhost port.
    pub addr: Option<SocketAddr>,
}

#[derive(Debug, Clone)]
pub struct StubRequest {
    pub path: String,
    pub authorization: Option<String>,
    pub body: Value,
}

pub struct StubServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    requests: Arc<Mutex<Vec<StubRequest>>>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(config: StubConfig) -> std::io::Result<Self> {
        let listener = TcpListener::bind(config.addr.unwrap_or_else(|| SocketAddr::from(([127, 0, 0, 1], 0))))?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let requests = Arc::new(Mutex::new(Vec::new()));
        let handle = {
            let (stop, requests) = (stop.clone(), requests.clone());
            let config = Arc::new(config);
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let (config, requests) = (config.clone(), requests.clone());
                    std::thread::spawn(move || {
                        if let Err(e) = serve(stream, &config, &requests) {
                            log::debug!("stub connection error: {e}");
                        }
                    });
                }
            })
        };
        Ok(Self { addr, stop, requests, handle: Some(handle) })
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn request_count(&self) -> usize {
        self.requests.lock().map(|r| r.len()).unwrap_or(0)
    }

    pub fn last_request(&self) -> Option<StubRequest> {
        self.requests.lock().ok()?.last().cloned()
    }

    /// Blocks the calling thread until the process is killed.
    pub fn wait(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve(stream: TcpStream, config: &StubConfig, requests: &Mutex<Vec<StubRequest>>) -> std::io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_secs(10)))?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line)? == 0 {
        return Ok(());
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut content_length = 0usize;
    let mut authorization = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line.trim().is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            match k.trim().to_ascii_lowercase().as_str() {
                "content-length" => content_length = v.trim().parse().unwrap_or(0),
                "authorization" => authorization = Some(v.trim().to_string()),
                _ => {}
            }
        }
    }
    let mut body = vec![0; content_length];
    reader.read_exact(&mut body)?;
    let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);

    let prompt = match path.as_str() {
        "/v1/chat/completions" => body
            .pointer("/messages")
            .and_then(Value::as_array)
            .and_then(|m| m.last())
            .and_then(|m| m.get("content"))
            .and_then(Value::as_str),
        _ => body.get("prompt").and_then(Value::as_str),
    }
    .unwrap_or_default()
    .to_string();
    if let Ok(mut r) = requests.lock() {
        r.push(StubRequest { path: path.clone(), authorization, body });
    }
    std::thread::sleep(config.delay);

    let (status, payload) = match (&config.reply, path.as_str()) {
        (StubReply::Status(code, text), _) => (*code, text.clone()),
        (_, "/v1/chat/completions" | "/api/generate") => {
            let text = match &config.reply {
                StubReply::Rules(rules, fallback) => rules
                    .iter()
                    .find(|(needle, _)| prompt.contains(needle.as_str()))
                    .map_or_else(|| fallback.clone(), |(_, r)| r.clone()),
                _ => prompt,
            };
            let payload = if path == "/api/generate" {
                json!({"model": "stub", "response": text, "done": true})
            } else {
                json!({"object": "chat.completion", "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}]})
            };
            (200, payload.to_string())
        }
        _ => (404, "not found".to_string()),
    };
    let reason = if status == 200 { "OK" } else { "Error" };
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    )?;
    stream.flush()
}
