use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// sha256 over `model_name`, a NUL separator and the full rendered prompt.
pub fn prompt_hash(model_name: &str, prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update(model_name.as_bytes());
    h.update([0u8]);
    h.update(prompt.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub prompt_hash: String,
    pub prompt: String,
    pub response: String,
    pub recorded_at: String,
}

#[derive(Debug, thiserror::Error)]
pub enum TranscriptError {
    #[error("transcript {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("transcript {path} line {line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
}

/// Prompt-hash → response map, optionally backed by an append-only JSON-lines
/// file. Lookups take a read lock; recording holds the writer mutex for the
/// whole append so lines never interleave.
#[derive(Debug, Default)]
pub struct TranscriptStore {
    responses: RwLock<HashMap<String, String>>,
    writer: Option<Mutex<File>>,
    path: Option<PathBuf>,
}

impl TranscriptStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Reads all entries of `path`; a later entry for the same hash wins.
    pub fn open(path: &Path) -> Result<Self, TranscriptError> {
        let io = |source| TranscriptError::Io { path: path.to_path_buf(), source };
        let file = File::open(path).map_err(io)?;
        let mut responses = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: TranscriptEntry = serde_json::from_str(&line).map_err(|source| TranscriptError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })?;
            responses.insert(entry.prompt_hash, entry.response);
        }
        Ok(Self { responses: RwLock::new(responses), writer: None, path: Some(path.to_path_buf()) })
    }

    /// Opens (creating if needed) `path` for recording; existing entries stay
    /// readable.
    pub fn open_for_append(path: &Path) -> Result<Self, TranscriptError> {
        let io = |source| TranscriptError::Io { path: path.to_path_buf(), source };
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        let mut store = Self::open(path)?;
        store.writer = Some(Mutex::new(file));
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.responses.read().map(|r| r.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, hash: &str) -> Option<String> {
        self.responses.read().ok()?.get(hash).cloned()
    }

    /// Stores a response in memory and, when file-backed for recording,
    /// appends it as one JSON line.
    pub fn record(&self, model_name: &str, prompt: &str, response: &str) -> Result<TranscriptEntry, TranscriptError> {
        let entry = TranscriptEntry {
            prompt_hash: prompt_hash(model_name, prompt),
            prompt: prompt.to_string(),
            response: response.to_string(),
            recorded_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        if let Some(writer) = &self.writer {
            let path = self.path.clone().unwrap_or_default();
            let mut line = serde_json::to_string(&entry).expect("transcript entries always serialize");
            line.push('\n');
            let mut file = writer.lock().unwrap_or_else(|e| e.into_inner());
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| TranscriptError::Io { path, source })?;
        }
        if let Ok(mut map) = self.responses.write() {
            map.insert(entry.prompt_hash.clone(), entry.response.clone());
        }
        Ok(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_covers_model_and_prompt() {
        let a = prompt_hash("gpt-4", "p");
        assert_eq!(a, prompt_hash("gpt-4", "p"));
        assert_ne!(a, prompt_hash("gpt-4o", "p"));
        assert_ne!(prompt_hash("ab", "c"), prompt_hash("a", "bc"));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn record_then_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let store = TranscriptStore::open_for_append(&path).unwrap();
        store.record("m", "prompt one", "MATCH (a) RETURN a.name").unwrap();
        store.record("m", "prompt two", "second").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);

        let replay = TranscriptStore::open(&path).unwrap();
        assert_eq!(replay.lookup(&prompt_hash("m", "prompt one")).as_deref(), Some("MATCH (a) RETURN a.name"));
        assert_eq!(replay.lookup(&prompt_hash("other", "prompt one")), None);
    }

    #[test]
    fn concurrent_recording_keeps_lines_whole() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let store = TranscriptStore::open_for_append(&path).unwrap();
        std::thread::scope(|s| {
            for t in 0..8 {
                let store = &store;
                s.spawn(move || {
                    for i in 0..20 {
                        store.record("m", &format!("{t}-{i}"), &"x".repeat(500)).unwrap();
                    }
                });
            }
        });
        let replay = TranscriptStore::open(&path).unwrap();
        assert_eq!(replay.len(), 160);
    }
}
