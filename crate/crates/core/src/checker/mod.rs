//! Three-stage validation and repair of generated queries against the graph
//! schema: return-clause syntax, node labels, relationship direction.

mod node;
mod relation;
mod syntax;

use serde::{Deserialize, Serialize};

use crate::cypher::{parse_query, serialize_query, CypherQuery};
use crate::graph::{EntityIndex, GraphSchema};

pub use node::node_type_check;
pub use relation::relation_direction_check;
pub use syntax::syntax_node_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CorrectionStage {
    SyntaxReturn,
    SyntaxBinding,
    NodeType,
    RelationAdjust,
    RelationDirection,
}

impl CorrectionStage {
    /// 0 = syntax, 1 = node, 2 = relation.
    pub fn checker(self) -> u8 {
        match self {
            CorrectionStage::SyntaxReturn | CorrectionStage::SyntaxBinding => 0,
            CorrectionStage::NodeType | CorrectionStage::RelationAdjust => 1,
            CorrectionStage::RelationDirection => 2,
        }
    }
}

/// One applied rewrite, with the query fragment before and after it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub stage: CorrectionStage,
    pub description: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefectKind {
    ParseError,
    UnknownEntity,
    UnknownLabel,
    NoCompatibleRelation,
    UnknownRelation,
    UnboundReturnVariable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedDefect {
    pub kind: DefectKind,
    pub detail: String,
}

impl UnresolvedDefect {
    pub fn new(kind: DefectKind, detail: impl Into<String>) -> Self {
        Self { kind, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairReport {
    pub input_query: String,
    pub output_query: String,
    pub corrections: Vec<Correction>,
    pub unresolved: Vec<UnresolvedDefect>,
    /// Final AST; `None` when the input did not parse.
    #[serde(skip)]
    pub query: Option<CypherQuery>,
}

impl RepairReport {
    /// No unresolved defects: the output query may be executed.
    pub fn is_executable(&self) -> bool {
        self.unresolved.is_empty() && self.query.is_some()
    }
}

/// Parses `query_text` and runs the syntax, node and relation checkers in
/// that order. A parse failure yields a report with the input passed through
/// untouched and a single `ParseError` defect.
pub fn check_and_repair(query_text: &str, schema: &GraphSchema, index: &EntityIndex) -> RepairReport {
    let query = match parse_query(query_text) {
        Ok(q) => q,
        Err(e) => {
            return RepairReport {
                input_query: query_text.to_string(),
                output_query: query_text.to_string(),
                corrections: Vec::new(),
                unresolved: vec![UnresolvedDefect::new(DefectKind::ParseError, e.to_string())],
                query: None,
            }
        }
    };
    let (query, mut corrections, mut unresolved) = syntax_node_check(&query);
    let (query, c, u) = node_type_check(&query, index, schema);
    corrections.extend(c);
    unresolved.extend(u);
    let (query, c, u) = relation_direction_check(&query, schema);
    corrections.extend(c);
    unresolved.extend(u);
    RepairReport {
        input_query: query_text.to_string(),
        output_query: serialize_query(&query),
        corrections,
        unresolved,
        query: Some(query),
    }
}

/// The validity predicate the checker aims for. Returns every violation:
/// labels outside the schema, names missing under their label, relationships
/// not present (in this orientation) in the schema, and return items other
/// than `var.name` of a bound variable.
pub fn validate(query: &CypherQuery, schema: &GraphSchema, index: &EntityIndex) -> Vec<UnresolvedDefect> {
    let mut issues = Vec::new();
    for at in query.node_refs() {
        let node = query.node(at);
        if let Some(label) = &node.label {
            if !schema.has_label(label) {
                issues.push(UnresolvedDefect::new(
                    DefectKind::UnknownLabel,
                    format!("label '{label}' is not in the schema"),
                ));
            }
        }
        if let Some(name) = &node.name {
            let ok = match query.effective_label(at) {
                Some(label) => index.contains(name, label),
                None => !index.lookup(name).is_empty(),
            };
            if !ok {
                issues.push(UnresolvedDefect::new(
                    DefectKind::UnknownEntity,
                    format!("no node named \"{name}\" with the given label"),
                ));
            }
        }
    }
    for (p, path) in query.patterns.iter().enumerate() {
        for i in 0..path.hops.len() {
            if let Some(issue) = relation::orientation_issue(query, schema, p, i) {
                issues.push(issue);
            }
        }
    }
    for item in &query.return_items {
        if !query.binds(&item.variable) {
            issues.push(UnresolvedDefect::new(
                DefectKind::UnboundReturnVariable,
                format!("'{}' is not bound in MATCH", item.variable),
            ));
        } else if item.property.as_deref() != Some("name") {
            issues.push(UnresolvedDefect::new(
                DefectKind::UnboundReturnVariable,
                format!("'{}' should be returned as {}.name", item.variable, item.variable),
            ));
        }
    }
    issues
}

/// Re-serializes `text` canonically when it parses.
pub fn canonicalize(text: &str) -> Option<String> {
    parse_query(text).ok().map(|q| serialize_query(&q))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::{build_entity_index, derive_schema, EntityIndex, GraphSchema, PropertyGraph};

    pub fn ms_graph() -> PropertyGraph {
        crate::graph::test_support::graph(
            &[
                ("ms", "disease", "multiple sclerosis"),
                ("d1", "drug", "fingolimod"),
                ("d2", "drug", "interferon beta-1a"),
                ("p1", "pathway", "immune signalling"),
                ("g1", "gene/protein", "APOE"),
                ("ph", "phenotype", "fatigue"),
            ],
            &[
                ("d1", "contraindication", "ms"),
                ("d2", "contraindication", "ms"),
                ("d2", "indication", "ms"),
                ("p1", "interacts with pathway", "g1"),
                ("g1", "gene/protein associated with disease", "ms"),
                ("d1", "side effect", "ph"),
            ],
        )
    }

    pub fn ms() -> (GraphSchema, EntityIndex) {
        let g = ms_graph();
        (derive_schema(&g), build_entity_index(&g))
    }
}
