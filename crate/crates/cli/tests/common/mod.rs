#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use graphqa_core::benchmark::load_benchmark;
use graphqa_core::fixture::as_llm_reply;
use graphqa_core::llm::{StubConfig, StubReply, StubServer};

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

/// Runs the `graphqa` binary from the workspace root.
pub fn graphqa(args: &[&str]) -> Output {
    graphqa_with_stdin(args, None)
}

pub fn graphqa_with_stdin(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_graphqa"))
        .args(args)
        .current_dir(root())
        .env("RUST_LOG", "warn")
        .env("LLM_API_KEY", "test-key")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default().as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn ok(o: Output) -> Output {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status,
        stdout(&o),
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

/// `--graph data/graph --transforms data/transforms.json`
pub const GRAPH: [&str; 4] = ["--graph", "data/graph", "--transforms", "data/transforms.json"];

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A local completion server that answers every benchmark question with its
/// gold query.
pub fn gold_stub() -> StubServer {
    let items = load_benchmark(&root().join("data/benchmark.json")).unwrap();
    let rules = items.iter().map(|i| (i.question.clone(), as_llm_reply(i.gold_cypher.as_deref().unwrap()))).collect();
    StubServer::start(StubConfig { reply: StubReply::Rules(rules, "no idea".into()), ..Default::default() }).unwrap()
}

/// A benchmark config with one chat-completions model and one generate-style
/// model, both pointing at `url`, over the three n-shot templates.
pub fn write_live_config(dir: &Path, url: &str) -> PathBuf {
    let cfg = serde_json::json!({
        "models": [
            { "backend": "openai_compatible", "endpoint_url": url, "model_name": "stub-chat", "temperature": 0 },
            { "backend": "ollama", "endpoint_url": url, "model_name": "stub-generate", "temperature": 0 }
        ],
        "templates": ["zero_shot", "one_shot", "few_shot"],
        "concurrency": 2
    });
    let p = dir.join("live_config.json");
    std::fs::write(&p, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    p
}

pub fn same_bytes(a: &Path, b: &Path, files: &[&str]) -> Result<(), String> {
    for f in files {
        let (x, y) = (std::fs::read(a.join(f)), std::fs::read(b.join(f)));
        match (x, y) {
            (Ok(x), Ok(y)) if x == y => {}
            (Ok(_), Ok(_)) => return Err(format!("{f} differs")),
            (x, y) => return Err(format!("{f}: {:?} / {:?}", x.err(), y.err())),
        }
    }
    Ok(())
}
