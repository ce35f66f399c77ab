use std::fmt::Write;

use super::{CypherQuery, Direction, NodePattern, RelPattern, ReturnItem};
use crate::ident::{escape_identifier, quote_string};

/// Canonical text: a single `MATCH` with comma-separated paths, a newline,
/// then `RETURN` with comma-separated items.
pub fn serialize_query(query: &CypherQuery) -> String {
    let mut out = String::from("MATCH ");
    for (i, path) in query.patterns.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&serialize_node(&path.start));
        for (rel, node) in &path.hops {
            out.push_str(&serialize_rel(rel));
            out.push_str(&serialize_node(node));
        }
    }
    out.push_str("\nRETURN ");
    if query.distinct {
        out.push_str("DISTINCT ");
    }
    let items: Vec<_> = query.return_items.iter().map(serialize_return_item).collect();
    out.push_str(&items.join(", "));
    out
}

pub fn serialize_node(node: &NodePattern) -> String {
    let mut out = String::from("(");
    if let Some(v) = &node.variable {
        out.push_str(&escape_identifier(v));
    }
    if let Some(l) = &node.label {
        let _ = write!(out, ":{}", escape_identifier(l));
    }
    if let Some(n) = &node.name {
        if node.variable.is_some() || node.label.is_some() {
            out.push(' ');
        }
        let _ = write!(out, "{{name:{}}}", quote_string(n));
    }
    out.push(')');
    out
}

pub fn serialize_rel(rel: &RelPattern) -> String {
    let name = escape_identifier(&rel.relation);
    match rel.direction {
        Direction::LeftToRight => format!("-[:{name}]->"),
        Direction::RightToLeft => format!("<-[:{name}]-"),
    }
}

pub fn serialize_return_item(item: &ReturnItem) -> String {
    match &item.property {
        Some(p) => format!("{}.{}", escape_identifier(&item.variable), escape_identifier(p)),
        None => escape_identifier(&item.variable).into_owned(),
    }
}
