//! The restricted Cypher dialect: `MATCH` path patterns plus a `RETURN` list.
//!
//! Queries are parsed into a [`CypherQuery`] AST, rewritten by the checker,
//! and written back out by [`serialize_query`] in one canonical layout.

mod extract;
mod lexer;
mod parser;
mod serialize;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use extract::{extract_cypher_block, ExtractError};
pub use parser::{parse_query, ParseError};
pub use serialize::{serialize_node, serialize_query, serialize_rel, serialize_return_item};

/// One `( ... )` element of a path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodePattern {
    pub variable: Option<String>,
    pub label: Option<String>,
    /// Value of the inline `{name:"..."}` property.
    pub name: Option<String>,
}

impl NodePattern {
    pub fn new(variable: Option<&str>, label: Option<&str>, name: Option<&str>) -> Self {
        Self {
            variable: variable.map(str::to_string),
            label: label.map(str::to_string),
            name: name.map(str::to_string),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.variable.is_none() && self.label.is_none() && self.name.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `-[:rel]->`
    LeftToRight,
    /// `<-[:rel]-`
    RightToLeft,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LeftToRight => "left-to-right",
            Direction::RightToLeft => "right-to-left",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelPattern {
    pub relation: String,
    pub direction: Direction,
}

impl RelPattern {
    pub fn new(relation: &str, direction: Direction) -> Self {
        Self { relation: relation.to_string(), direction }
    }
}

/// A path `n0 -r1- n1 -r2- n2 ...`: one start node followed by zero or more hops.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<PathElement>", try_from = "Vec<PathElement>")]
pub struct PathPattern {
    pub start: NodePattern,
    pub hops: Vec<(RelPattern, NodePattern)>,
}

impl PathPattern {
    pub fn single(node: NodePattern) -> Self {
        Self { start: node, hops: Vec::new() }
    }

    pub fn then(mut self, rel: RelPattern, node: NodePattern) -> Self {
        self.hops.push((rel, node));
        self
    }

    /// Node at position `i` (0 = start).
    pub fn node(&self, i: usize) -> &NodePattern {
        if i == 0 {
            &self.start
        } else {
            &self.hops[i - 1].1
        }
    }

    pub fn node_mut(&mut self, i: usize) -> &mut NodePattern {
        if i == 0 {
            &mut self.start
        } else {
            &mut self.hops[i - 1].1
        }
    }

    pub fn node_count(&self) -> usize {
        self.hops.len() + 1
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodePattern> {
        std::iter::once(&self.start).chain(self.hops.iter().map(|(_, n)| n))
    }

    /// Relationship `i` connects node `i` (left) and node `i + 1` (right).
    pub fn rel(&self, i: usize) -> &RelPattern {
        &self.hops[i].0
    }
}

/// Element of the JSON projection of a path: alternating node and rel objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PathElement {
    Node(NodePattern),
    Rel(RelPattern),
}

impl From<PathPattern> for Vec<PathElement> {
    fn from(path: PathPattern) -> Self {
        let mut out = vec![PathElement::Node(path.start)];
        for (rel, node) in path.hops {
            out.push(PathElement::Rel(rel));
            out.push(PathElement::Node(node));
        }
        out
    }
}

impl TryFrom<Vec<PathElement>> for PathPattern {
    type Error = String;

    fn try_from(elements: Vec<PathElement>) -> Result<Self, Self::Error> {
        let mut iter = elements.into_iter();
        let start = match iter.next() {
            Some(PathElement::Node(n)) => n,
            _ => return Err("path must start with a node".into()),
        };
        let mut hops = Vec::new();
        while let Some(el) = iter.next() {
            let PathElement::Rel(rel) = el else {
                return Err("path elements must alternate node/rel".into());
            };
            match iter.next() {
                Some(PathElement::Node(n)) => hops.push((rel, n)),
                _ => return Err("relationship must be followed by a node".into()),
            }
        }
        Ok(PathPattern { start, hops })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReturnItem {
    pub variable: String,
    pub property: Option<String>,
}

impl ReturnItem {
    pub fn new(variable: &str, property: Option<&str>) -> Self {
        Self { variable: variable.to_string(), property: property.map(str::to_string) }
    }

    pub fn name_of(variable: &str) -> Self {
        Self::new(variable, Some("name"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CypherQuery {
    /// Every path from every `MATCH` clause, in source order.
    pub patterns: Vec<PathPattern>,
    #[serde(rename = "return")]
    pub return_items: Vec<ReturnItem>,
    #[serde(default)]
    pub distinct: bool,
}

/// Address of one node occurrence inside a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub pattern: usize,
    pub position: usize,
}

impl CypherQuery {
    pub fn node(&self, at: NodeRef) -> &NodePattern {
        self.patterns[at.pattern].node(at.position)
    }

    pub fn node_mut(&mut self, at: NodeRef) -> &mut NodePattern {
        self.patterns[at.pattern].node_mut(at.position)
    }

    /// All node occurrences in source order.
    pub fn node_refs(&self) -> Vec<NodeRef> {
        self.patterns
            .iter()
            .enumerate()
            .flat_map(|(p, path)| (0..path.node_count()).map(move |position| NodeRef { pattern: p, position }))
            .collect()
    }

    pub fn binds(&self, variable: &str) -> bool {
        self.patterns.iter().flat_map(PathPattern::nodes).any(|n| n.variable.as_deref() == Some(variable))
    }

    /// Label for a variable: the first labelled occurrence wins.
    pub fn label_of_variable(&self, variable: &str) -> Option<&str> {
        self.patterns
            .iter()
            .flat_map(PathPattern::nodes)
            .filter(|n| n.variable.as_deref() == Some(variable))
            .find_map(|n| n.label.as_deref())
    }

    /// Label that applies to a node occurrence: its own, or its variable's.
    pub fn effective_label(&self, at: NodeRef) -> Option<&str> {
        let node = self.node(at);
        node.label.as_deref().or_else(|| node.variable.as_deref().and_then(|v| self.label_of_variable(v)))
    }

    pub fn hop_count(&self) -> usize {
        self.patterns.iter().map(|p| p.hops.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_projection_alternates_nodes_and_rels() {
        let q = CypherQuery {
            patterns: vec![PathPattern::single(NodePattern::new(Some("d"), Some("disease"), None)).then(
                RelPattern::new("contraindication", Direction::RightToLeft),
                NodePattern::new(Some("dr"), Some("drug"), None),
            )],
            return_items: vec![ReturnItem::name_of("dr")],
            distinct: false,
        };
        let v = serde_json::to_value(&q).unwrap();
        let kinds: Vec<_> =
            v["patterns"][0].as_array().unwrap().iter().map(|e| e["type"].as_str().unwrap().to_string()).collect();
        assert_eq!(kinds, ["node", "rel", "node"]);
        assert_eq!(v["patterns"][0][1]["direction"], "right_to_left");
        let back: CypherQuery = serde_json::from_value(v).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn malformed_json_path_rejected() {
        let v = serde_json::json!({
            "patterns": [[{"type": "rel", "relation": "r", "direction": "left_to_right"}]],
            "return": [{"variable": "a", "property": "name"}]
        });
        assert!(serde_json::from_value::<CypherQuery>(v).is_err());
    }
}
