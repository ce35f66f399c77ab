//! Random query ASTs and alternative (non-canonical) spellings of them.

use rand::seq::SliceRandom;
use rand::Rng;

use graphqa_core::cypher::{CypherQuery, Direction, NodePattern, PathPattern, RelPattern, ReturnItem};
use graphqa_core::escape_identifier;

use crate::shapes::shape;

/// Words the generator draws from.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub labels: Vec<String>,
    pub relations: Vec<String>,
    pub names: Vec<String>,
    pub variables: Vec<String>,
    /// Chance that the first occurrence of a slot carries a label.
    pub label_rate: f64,
    /// Chance that the first occurrence of a slot carries a name filter.
    pub name_rate: f64,
}

fn owned(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Default for Vocabulary {
    /// Mixes plain identifiers with ones that need backticks (spaces,
    /// slashes, hyphens, reserved words, embedded backticks) and names with
    /// quotes, backslashes and non-ASCII text.
    fn default() -> Self {
        Self {
            labels: owned(&[
                "drug",
                "disease",
                "gene/protein",
                "biological_process",
                "effect",
                "Match",
                "x y",
                "odd`tick",
                "Label9",
            ]),
            relations: owned(&[
                "contraindication",
                "side effect",
                "protein-protein interaction",
                "ppi",
                "RETURN",
                "a`b",
                "linked_to",
            ]),
            names: owned(&[
                "multiple sclerosis",
                "interferon beta-1a",
                "O'Brien syndrome",
                "say \"hi\"",
                "back\\slash",
                "Sjögren",
                "{braces}",
                "APOE",
                "x",
                "MATCH (n) RETURN n",
            ]),
            variables: owned(&["a", "b", "dr", "d", "g1", "_x", "n", "my var", "m2", "Where"]),
            label_rate: 0.7,
            name_rate: 0.4,
        }
    }
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &'a [String]) -> &'a str {
    &xs[rng.random_range(0..xs.len())]
}

/// A well-formed query of the given structure (1..=5).
pub fn random_query<R: Rng>(rng: &mut R, structure: u8, vocab: &Vocabulary) -> CypherQuery {
    let shape = shape(structure);
    let mut vars = vocab.variables.clone();
    vars.shuffle(rng);
    let mut variable: Vec<Option<String>> = (0..shape.slots).map(|s| Some(vars[s].clone())).collect();
    for (s, v) in variable.iter_mut().enumerate() {
        if s != shape.ret && shape.occurrences(s) == 1 && rng.random_bool(0.3) {
            *v = None;
        }
    }
    let mut seen = vec![false; shape.slots];
    let mut node = |rng: &mut R, s: usize| {
        let first = !std::mem::replace(&mut seen[s], true);
        let mut n = NodePattern {
            variable: variable[s].clone(),
            label: (rng.random_bool(if first { vocab.label_rate } else { 0.2 }))
                .then(|| pick(rng, &vocab.labels).to_string()),
            name: (first && rng.random_bool(vocab.name_rate)).then(|| pick(rng, &vocab.names).to_string()),
        };
        if n.is_empty() {
            n.label = Some(pick(rng, &vocab.labels).to_string());
        }
        n
    };
    let mut patterns = Vec::new();
    for layout in &shape.paths {
        let mut order = layout.clone();
        if rng.random_bool(0.5) {
            order.reverse();
        }
        let mut path = PathPattern::single(node(rng, order[0]));
        for &s in &order[1..] {
            let dir = if rng.random_bool(0.5) { Direction::LeftToRight } else { Direction::RightToLeft };
            let rel = RelPattern::new(pick(rng, &vocab.relations), dir);
            path = path.then(rel, node(rng, s));
        }
        patterns.push(path);
    }
    let ret_var = variable[shape.ret].clone().expect("answer slot is named");
    let property = match rng.random_range(0..10) {
        0 => None,
        1 => Some("id"),
        _ => Some("name"),
    };
    let mut return_items = vec![ReturnItem::new(&ret_var, property)];
    if rng.random_bool(0.3) {
        if let Some(other) = variable.iter().flatten().find(|v| **v != ret_var) {
            return_items.push(ReturnItem::name_of(other));
        }
    }
    CypherQuery { patterns, return_items, distinct: rng.random_bool(0.2) }
}

fn keyword<R: Rng>(rng: &mut R, kw: &str) -> String {
    match rng.random_range(0..3) {
        0 => kw.to_uppercase(),
        1 => kw.to_lowercase(),
        _ => {
            let mut c = kw.chars();
            c.next().map(|f| f.to_uppercase().collect::<String>() + &c.as_str().to_lowercase()).unwrap_or_default()
        }
    }
}

fn quoted(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn ident<R: Rng>(rng: &mut R, s: &str) -> String {
    let escaped = escape_identifier(s);
    if escaped.starts_with('`') || rng.random_bool(0.8) {
        escaped.into_owned()
    } else {
        format!("`{s}`")
    }
}

fn space<R: Rng>(rng: &mut R) -> &'static str {
    [" ", "  ", "\n  ", " "][rng.random_range(0..4)]
}

/// Another spelling of `q` that parses to the same AST: mixed keyword case,
/// needless backticks, name filters moved into `WHERE`, paths spread over
/// several `MATCH` clauses, odd whitespace and an optional semicolon.
pub fn noncanonical_text<R: Rng>(rng: &mut R, q: &CypherQuery) -> String {
    let mut clauses: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    let mut named_once = std::collections::HashSet::new();
    for path in &q.patterns {
        let mut where_parts = Vec::new();
        let mut text = String::new();
        let mut render = |rng: &mut R, n: &NodePattern, text: &mut String, where_parts: &mut Vec<String>| {
            text.push('(');
            if let Some(v) = &n.variable {
                text.push_str(&ident(rng, v));
            }
            if let Some(l) = &n.label {
                text.push(':');
                text.push_str(&ident(rng, l));
            }
            if let Some(name) = &n.name {
                let first_for_var = n.variable.as_ref().is_some_and(|v| named_once.insert(v.clone()));
                match &n.variable {
                    Some(v) if first_for_var && rng.random_bool(0.4) => {
                        where_parts.push(format!("{}.name = {}", ident(rng, v), quoted(name)));
                    }
                    _ => {
                        text.push_str(if n.variable.is_some() || n.label.is_some() { " {name: " } else { "{name:" });
                        text.push_str(&quoted(name));
                        text.push('}');
                    }
                }
            }
            text.push(')');
        };
        render(rng, &path.start, &mut text, &mut where_parts);
        for (rel, node) in &path.hops {
            let r = ident(rng, &rel.relation);
            match rel.direction {
                Direction::LeftToRight => text.push_str(&format!("-[:{r}]->")),
                Direction::RightToLeft => text.push_str(&format!("<-[:{r}]-")),
            }
            render(rng, node, &mut text, &mut where_parts);
        }
        match clauses.last_mut() {
            Some(last) if rng.random_bool(0.5) => {
                last.0.push(text);
                last.1.extend(where_parts);
            }
            _ => clauses.push((vec![text], where_parts)),
        }
    }
    let mut out = String::new();
    for (paths, wheres) in clauses {
        out.push_str(&keyword(rng, "match"));
        out.push_str(space(rng));
        out.push_str(&paths.join(", "));
        if !wheres.is_empty() {
            out.push_str(space(rng));
            out.push_str(&keyword(rng, "where"));
            out.push(' ');
            let and = format!(" {} ", keyword(rng, "and"));
            out.push_str(&wheres.join(&and));
        }
        out.push('\n');
    }
    out.push_str(&keyword(rng, "return"));
    out.push(' ');
    if q.distinct {
        out.push_str(&keyword(rng, "distinct"));
        out.push(' ');
    }
    let items: Vec<String> = q
        .return_items
        .iter()
        .map(|i| match &i.property {
            Some(p) => format!("{}.{}", ident(rng, &i.variable), p),
            None => ident(rng, &i.variable),
        })
        .collect();
    out.push_str(&items.join(", "));
    if rng.random_bool(0.3) {
        out.push(';');
    }
    out
}
