use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GraphEdge, GraphError, PropertyGraph};

/// Renames edges whose relation is `from`. With `between`, only edges joining
/// those two labels (in either direction) are renamed, which lets one generic
/// name such as `interacts with` map to a different name per label pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenameRule {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub between: Option<[String; 2]>,
    /// Free-form provenance, e.g. the upstream relation column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RenameRule {
    pub fn new(from: &str, to: &str) -> Self {
        Self { from: from.into(), to: to.into(), between: None, note: None }
    }

    pub fn between(from: &str, to: &str, a: &str, b: &str) -> Self {
        Self { between: Some([a.into(), b.into()]), ..Self::new(from, to) }
    }

    fn key(&self) -> (String, Option<[String; 2]>) {
        let between = self.between.clone().map(|[a, b]| if a <= b { [a, b] } else { [b, a] });
        (self.from.clone(), between)
    }

    fn applies(&self, relation: &str, src: &str, dst: &str) -> bool {
        self.from == relation
            && match &self.between {
                None => true,
                Some([a, b]) => (a == src && b == dst) || (a == dst && b == src),
            }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformConfig {
    #[serde(default)]
    pub relation_renames: Vec<RenameRule>,
    #[serde(default)]
    pub drop_reverse_duplicates: bool,
    /// Same-label relations (post-rename names) kept in both directions.
    #[serde(default)]
    pub bidirectional_self_relations: BTreeSet<String>,
}

impl TransformConfig {
    pub fn load(path: &Path) -> Result<Self, GraphError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|source| GraphError::Json { path: path.to_path_buf(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rename keys must be distinct, and no target name may itself be a
    /// rename source (that would make a second application rename again).
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut keys = HashSet::new();
        for rule in &self.relation_renames {
            if rule.from.is_empty() || rule.to.is_empty() {
                return Err(GraphError::Transform("rename names must be non-empty".into()));
            }
            if !keys.insert(rule.key()) {
                return Err(GraphError::Transform(format!("duplicate rename rule for '{}'", rule.from)));
            }
        }
        let sources: HashSet<&str> = self.relation_renames.iter().map(|r| r.from.as_str()).collect();
        if let Some(r) = self.relation_renames.iter().find(|r| sources.contains(r.to.as_str())) {
            return Err(GraphError::Transform(format!("rename target '{}' is also a rename source", r.to)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Transformed {
    pub graph: PropertyGraph,
    /// Non-fatal issues, e.g. rename rules that matched no edge.
    pub warnings: Vec<String>,
}

/// Applies renames, then (optionally) keeps one direction of every reverse
/// pair between different labels, then completes listed same-label
/// relations to both directions.
///
/// The direction kept for a relation between two labels is the one its first
/// edge in input order uses, so the whole relation ends up one-directional.
/// Same-label edges are never dropped.
pub fn apply_transforms(graph: &PropertyGraph, cfg: &TransformConfig) -> Result<Transformed, GraphError> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let label = |id: &str| graph.node_by_id(id).map(|n| n.label.as_str()).unwrap_or_default();

    let mut used = vec![false; cfg.relation_renames.len()];
    let mut edges: Vec<GraphEdge> = graph
        .edges()
        .iter()
        .map(|e| {
            let (src, dst) = (label(&e.source), label(&e.target));
            // scoped rules win over unscoped ones
            let hit = cfg
                .relation_renames
                .iter()
                .position(|r| r.between.is_some() && r.applies(&e.relation, src, dst))
                .or_else(|| {
                    cfg.relation_renames.iter().position(|r| r.between.is_none() && r.applies(&e.relation, src, dst))
                });
            match hit {
                Some(i) => {
                    used[i] = true;
                    GraphEdge::new(e.source.clone(), cfg.relation_renames[i].to.clone(), e.target.clone())
                }
                None => e.clone(),
            }
        })
        .collect();
    for (rule, used) in cfg.relation_renames.iter().zip(used) {
        if !used {
            let scope = rule.between.as_ref().map(|[a, b]| format!(" between {a} and {b}")).unwrap_or_default();
            let msg = format!("rename rule '{}' -> '{}'{scope} matched no edge", rule.from, rule.to);
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    if cfg.drop_reverse_duplicates {
        let present: HashSet<(&str, &str, &str)> =
            edges.iter().map(|e| (e.source.as_str(), e.relation.as_str(), e.target.as_str())).collect();
        // (relation, source label, target label) of the first edge per relation and label pair
        let mut canonical: HashMap<(&str, &str, &str), (&str, &str)> = HashMap::new();
        for e in &edges {
            let (s, t) = (label(&e.source), label(&e.target));
            if s != t {
                let key = if s < t { (e.relation.as_str(), s, t) } else { (e.relation.as_str(), t, s) };
                canonical.entry(key).or_insert((s, t));
            }
        }
        let keep: Vec<bool> = edges
            .iter()
            .map(|e| {
                let (s, t) = (label(&e.source), label(&e.target));
                if s == t || !present.contains(&(e.target.as_str(), e.relation.as_str(), e.source.as_str())) {
                    return true;
                }
                let key = if s < t { (e.relation.as_str(), s, t) } else { (e.relation.as_str(), t, s) };
                canonical[&key] == (s, t)
            })
            .collect();
        let mut k = keep.into_iter();
        edges.retain(|_| k.next().unwrap_or(true));
    }

    if !cfg.bidirectional_self_relations.is_empty() {
        let present: HashSet<(String, String, String)> =
            edges.iter().map(|e| (e.source.clone(), e.relation.clone(), e.target.clone())).collect();
        let mut completed = Vec::with_capacity(edges.len());
        let mut added = HashSet::new();
        for e in edges {
            let needs_reverse = cfg.bidirectional_self_relations.contains(&e.relation)
                && label(&e.source) == label(&e.target)
                && !present.contains(&(e.target.clone(), e.relation.clone(), e.source.clone()))
                && added.insert((e.target.clone(), e.relation.clone(), e.source.clone()));
            let reverse = needs_reverse.then(|| GraphEdge::new(e.target.clone(), e.relation.clone(), e.source.clone()));
            completed.push(e);
            completed.extend(reverse);
        }
        edges = completed;
    }

    let graph = PropertyGraph::new(graph.nodes().to_vec(), edges)?;
    Ok(Transformed { graph, warnings })
}
