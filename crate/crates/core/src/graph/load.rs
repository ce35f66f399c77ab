use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GraphEdge, GraphError, GraphNode, PropertyGraph};

/// On-disk graph layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// A directory holding `nodes.tsv` (`id<TAB>label<TAB>name`) and
    /// `edges.tsv` (`source_id<TAB>relation<TAB>target_id`), no header.
    /// The path may also name `nodes.tsv` itself.
    TriplesTsv,
    /// One `{"nodes": [...], "edges": [...]}` document.
    GraphJson,
}

impl GraphFormat {
    /// JSON for `*.json` files, TSV for everything else.
    pub fn detect(path: &Path) -> Self {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            GraphFormat::GraphJson
        } else {
            GraphFormat::TriplesTsv
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDocument {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
}

pub fn load_graph(path: &Path, format: GraphFormat) -> Result<PropertyGraph, GraphError> {
    match format {
        GraphFormat::GraphJson => {
            let text = read(path)?;
            let doc: GraphDocument =
                serde_json::from_str(&text).map_err(|source| GraphError::Json { path: path.to_path_buf(), source })?;
            PropertyGraph::new(doc.nodes, doc.edges)
        }
        GraphFormat::TriplesTsv => {
            let (nodes_path, edges_path) = tsv_paths(path);
            let nodes_text = read(&nodes_path)?;
            let edges_text = read(&edges_path)?;
            let mut nodes = Vec::new();
            let mut node_lines = Vec::new();
            for (line, [id, label, name]) in records(&nodes_text, &nodes_path)? {
                nodes.push(GraphNode::new(id, label, name));
                node_lines.push(Some(line));
            }
            let mut edges = Vec::new();
            let mut edge_lines = Vec::new();
            for (line, [source, relation, target]) in records(&edges_text, &edges_path)? {
                edges.push(GraphEdge::new(source, relation, target));
                edge_lines.push(Some(line));
            }
            PropertyGraph::build(nodes, node_lines, edges, edge_lines)
        }
    }
}

fn tsv_paths(path: &Path) -> (PathBuf, PathBuf) {
    if path.is_dir() {
        (path.join("nodes.tsv"), path.join("edges.tsv"))
    } else {
        let dir = path.parent().unwrap_or(Path::new("."));
        (path.to_path_buf(), dir.join("edges.tsv"))
    }
}

fn read(path: &Path) -> Result<String, GraphError> {
    fs::read_to_string(path).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })
}

/// Three tab-separated fields per non-blank line, with 1-based line numbers.
fn records<'a>(text: &'a str, path: &Path) -> Result<Vec<(usize, [&'a str; 3])>, GraphError> {
    let file = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [a, b, c] = fields[..] else {
            return Err(GraphError::Malformed {
                file: file.clone(),
                line: i + 1,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        if let Some(pos) = [a, b, c].iter().position(|f| f.is_empty()) {
            return Err(GraphError::Malformed {
                file: file.clone(),
                line: i + 1,
                message: format!("field {} is empty", pos + 1),
            });
        }
        out.push((i + 1, [a, b, c]));
    }
    Ok(out)
}

pub fn save_graph_json(graph: &PropertyGraph, path: &Path) -> Result<(), GraphError> {
    let doc = GraphDocument { nodes: graph.nodes().to_vec(), edges: graph.edges().to_vec() };
    let mut text = serde_json::to_string_pretty(&doc).expect("graph serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })
}

/// Writes `nodes.tsv` and `edges.tsv` into `dir`. Extra node properties are
/// not representable in this format and are dropped.
pub fn save_graph_tsv(graph: &PropertyGraph, dir: &Path) -> Result<(), GraphError> {
    let io = |path: PathBuf| move |source| GraphError::Io { path, source };
    fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
    let mut nodes = String::new();
    for n in graph.nodes() {
        nodes.push_str(&format!("{}\t{}\t{}\n", n.id, n.label, n.name));
    }
    let mut edges = String::new();
    for e in graph.edges() {
        edges.push_str(&format!("{}\t{}\t{}\n", e.source, e.relation, e.target));
    }
    fs::write(dir.join("nodes.tsv"), nodes).map_err(io(dir.join("nodes.tsv")))?;
    fs::write(dir.join("edges.tsv"), edges).map_err(io(dir.join("edges.tsv")))
}
