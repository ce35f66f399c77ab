use serde::Serialize;

use super::lexer::{tokenize, Tok, Token};
use super::{CypherQuery, Direction, NodePattern, PathPattern, RelPattern, ReturnItem};

/// Clauses and keywords outside the supported subset.
const UNSUPPORTED_CLAUSES: &[&str] = &[
    "OPTIONAL", "CREATE", "MERGE", "DELETE", "DETACH", "SET", "REMOVE", "WITH", "UNWIND", "CALL", "ORDER", "SKIP",
    "LIMIT", "UNION", "FOREACH", "LOAD", "YIELD",
];

const AGGREGATES: &[&str] = &["count", "collect", "sum", "avg", "min", "max", "stdev", "percentilecont"];

/// A syntax error with a byte offset and 1-based line/column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub(crate) fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(src.len());
        let before = &src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self { message: message.into(), offset, line, column }
    }
}

/// Parses query text into an AST.
///
/// Accepts any number of `MATCH` clauses (each with comma-separated paths and
/// an optional `WHERE` made of `var.name = "..."` equalities joined by `AND`),
/// followed by `RETURN [DISTINCT] item, ...` and an optional `;`. Keywords are
/// case-insensitive. `WHERE` equalities are folded into inline name filters.
pub fn parse_query(text: &str) -> Result<CypherQuery, ParseError> {
    let tokens = tokenize(text)?;
    Parser { src: text, tokens, pos: 0 }.query()
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

struct NameEquality {
    variable: String,
    name: String,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + ahead).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.src.len(), |t| t.offset)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::at(self.src, self.offset(), message))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Word(w)) => format!("'{w}'"),
            Some(Tok::Quoted(w)) => format!("`{w}`"),
            Some(Tok::Str(s)) => format!("string \"{s}\""),
            Some(Tok::Number(n)) => format!("number {n}"),
            Some(t) => format!("'{}'", punct(t)),
        }
    }

    fn keyword(&self) -> Option<String> {
        match self.peek() {
            Some(Tok::Word(w)) => Some(w.to_ascii_uppercase()),
            _ => None,
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.keyword().as_deref() == Some(kw)
    }

    fn query(mut self) -> Result<CypherQuery, ParseError> {
        let mut patterns = Vec::new();
        let mut equalities = Vec::new();
        loop {
            match self.keyword().as_deref() {
                Some("MATCH") => {
                    self.pos += 1;
                    patterns.push(self.path()?);
                    while self.eat(&Tok::Comma) {
                        patterns.push(self.path()?);
                    }
                    if self.at_keyword("WHERE") {
                        self.pos += 1;
                        self.where_clause(&mut equalities)?;
                    }
                }
                Some("RETURN") if !patterns.is_empty() => break,
                Some("RETURN") => return self.err("RETURN without a preceding MATCH clause"),
                Some(kw) if UNSUPPORTED_CLAUSES.contains(&kw) => {
                    return self.err(format!("unsupported clause {kw}: only MATCH ... RETURN queries are allowed"))
                }
                _ if patterns.is_empty() => return self.err(format!("expected MATCH, found {}", self.describe())),
                _ if self.peek().is_none() => return self.err("missing RETURN clause"),
                _ => return self.err(format!("expected MATCH or RETURN, found {}", self.describe())),
            }
        }
        self.pos += 1; // RETURN
        let distinct = if self.at_keyword("DISTINCT") {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut return_items = vec![self.return_item()?];
        while self.eat(&Tok::Comma) {
            return_items.push(self.return_item()?);
        }
        self.eat(&Tok::Semi);
        if self.peek().is_some() {
            return match self.keyword() {
                Some(kw) if UNSUPPORTED_CLAUSES.contains(&kw.as_str()) => {
                    self.err(format!("unsupported clause {kw}: only MATCH ... RETURN queries are allowed"))
                }
                _ => self.err(format!("unexpected {} after RETURN clause", self.describe())),
            };
        }
        let mut query = CypherQuery { patterns, return_items, distinct };
        apply_equalities(self.src, &mut query, equalities)?;
        Ok(query)
    }

    fn path(&mut self) -> Result<PathPattern, ParseError> {
        // `p = (a)-...` named paths
        if matches!(self.peek(), Some(Tok::Word(_))) && self.peek_at(1) == Some(&Tok::Eq) {
            return self.err("named paths are not supported");
        }
        let mut path = PathPattern::single(self.node()?);
        while matches!(self.peek(), Some(Tok::Dash) | Some(Tok::Lt)) {
            let rel = self.rel()?;
            let node = self.node()?;
            path.hops.push((rel, node));
        }
        Ok(path)
    }

    fn identifier(&mut self) -> Option<String> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Some(w)
            }
            Some(Tok::Quoted(w)) => {
                let w = w.clone();
                self.pos += 1;
                Some(w)
            }
            _ => None,
        }
    }

    fn node(&mut self) -> Result<NodePattern, ParseError> {
        let start = self.offset();
        self.expect(&Tok::LParen, "'(' to start a node pattern")?;
        let variable = self.identifier();
        let mut label = None;
        if self.eat(&Tok::Colon) {
            match self.identifier() {
                Some(l) => label = Some(l),
                None => return self.err(format!("expected a label after ':', found {}", self.describe())),
            }
            if self.peek() == Some(&Tok::Colon) {
                return self.err("multiple labels on one node are not supported");
            }
        }
        let mut name = None;
        if self.eat(&Tok::LBrace) {
            name = Some(self.name_map()?);
        }
        if self.peek() != Some(&Tok::RParen) {
            return self.err(format!("expected ')' to close the node pattern, found {}", self.describe()));
        }
        self.pos += 1;
        let node = NodePattern { variable, label, name };
        if node.is_empty() {
            return Err(ParseError::at(
                self.src,
                start,
                "anonymous node pattern '()' needs a variable, a label or a name filter",
            ));
        }
        Ok(node)
    }

    /// Body of `{name: "..."}` after the opening brace.
    fn name_map(&mut self) -> Result<String, ParseError> {
        let key_offset = self.offset();
        let key = match self.identifier() {
            Some(k) => k,
            None => return self.err(format!("expected a property key, found {}", self.describe())),
        };
        if key != "name" {
            return Err(ParseError::at(
                self.src,
                key_offset,
                format!("unsupported inline property '{key}': only name filters are allowed"),
            ));
        }
        self.expect(&Tok::Colon, "':' after property key")?;
        let value = match self.peek() {
            Some(Tok::Str(s)) => s.clone(),
            _ => return self.err("name filter value must be a string literal"),
        };
        self.pos += 1;
        if self.peek() == Some(&Tok::Comma) {
            return self.err("only a single name property is supported in a node pattern");
        }
        self.expect(&Tok::RBrace, "'}'")?;
        Ok(value)
    }

    fn rel(&mut self) -> Result<RelPattern, ParseError> {
        let start = self.offset();
        let left = self.eat(&Tok::Lt);
        self.expect(&Tok::Dash, "'-' in relationship pattern")?;
        if self.peek() != Some(&Tok::LBracket) {
            return self.err("relationship pattern needs a type, e.g. -[:relation]->");
        }
        self.pos += 1;
        let _rel_var = self.identifier();
        let relation = if self.eat(&Tok::Colon) {
            match self.identifier() {
                Some(r) => r,
                None if self.peek() == Some(&Tok::Star) => return self.asterisk(),
                None => return self.err(format!("expected a relationship type, found {}", self.describe())),
            }
        } else if self.peek() == Some(&Tok::Star) {
            return self.asterisk();
        } else {
            return self.err("relationship pattern needs a type, e.g. -[:relation]->");
        };
        match self.peek() {
            Some(Tok::Star) => return self.asterisk(),
            Some(Tok::Pipe) => return self.err("alternative relationship types ('|') are not supported"),
            Some(Tok::LBrace) => return self.err("relationship properties are not supported"),
            Some(Tok::Colon) => return self.err("alternative relationship types are not supported"),
            _ => {}
        }
        self.expect(&Tok::RBracket, "']'")?;
        self.expect(&Tok::Dash, "'-' after relationship")?;
        let right = self.eat(&Tok::Gt);
        match (left, right) {
            (true, false) => Ok(RelPattern { relation, direction: Direction::RightToLeft }),
            (false, true) => Ok(RelPattern { relation, direction: Direction::LeftToRight }),
            (true, true) => Err(ParseError::at(self.src, start, "relationship cannot point both ways")),
            (false, false) => Err(ParseError::at(
                self.src,
                start,
                "undirected relationships are not supported; use -[:r]-> or <-[:r]-",
            )),
        }
    }

    fn asterisk<T>(&self) -> Result<T, ParseError> {
        self.err("variable-length relationships (the asterisk operator '*') are not supported")
    }

    fn where_clause(&mut self, out: &mut Vec<NameEquality>) -> Result<(), ParseError> {
        loop {
            out.push(self.equality()?);
            if self.at_keyword("AND") {
                self.pos += 1;
                continue;
            }
            match self.keyword().as_deref() {
                Some(op @ ("OR" | "XOR" | "NOT")) => {
                    return self.err(format!("only AND-joined equalities are supported in WHERE, found {op}"))
                }
                _ => return Ok(()),
            }
        }
    }

    fn equality(&mut self) -> Result<NameEquality, ParseError> {
        let offset = self.offset();
        if self.at_keyword("NOT") {
            return self.err("only equality predicates are supported in WHERE");
        }
        let Some(variable) = self.identifier() else {
            return self.err(format!("expected `variable.name = \"...\"` in WHERE, found {}", self.describe()));
        };
        if self.peek() == Some(&Tok::LParen) {
            return self.err(format!("function calls are not supported in WHERE ({variable})"));
        }
        self.expect(&Tok::Dot, "'.' after variable in WHERE")?;
        let prop_offset = self.offset();
        let Some(prop) = self.identifier() else {
            return self.err("expected a property name");
        };
        match self.peek() {
            Some(Tok::Eq) => self.pos += 1,
            Some(Tok::Lt) | Some(Tok::Gt) => return self.err("only equality predicates are supported in WHERE"),
            Some(Tok::Word(w)) => {
                let w = w.to_ascii_uppercase();
                return self.err(format!("only equality predicates are supported in WHERE, found {w}"));
            }
            _ => return self.err(format!("expected '=' in WHERE, found {}", self.describe())),
        }
        if self.peek() == Some(&Tok::Eq) || self.peek() == Some(&Tok::Gt) {
            return self.err("only equality predicates are supported in WHERE");
        }
        let name = match self.peek() {
            Some(Tok::Str(s)) => s.clone(),
            _ => return self.err("WHERE equality must compare against a string literal"),
        };
        self.pos += 1;
        if prop != "name" {
            return Err(ParseError::at(
                self.src,
                prop_offset,
                format!("unsupported property '{prop}' in WHERE: only name equality is allowed"),
            ));
        }
        Ok(NameEquality { variable, name, offset })
    }

    fn return_item(&mut self) -> Result<ReturnItem, ParseError> {
        if self.peek() == Some(&Tok::Star) {
            return self.err("RETURN * is not supported; return named variables");
        }
        let Some(variable) = self.identifier() else {
            return self.err(format!("expected a variable in RETURN, found {}", self.describe()));
        };
        if self.peek() == Some(&Tok::LParen) {
            let lower = variable.to_ascii_lowercase();
            return if AGGREGATES.contains(&lower.as_str()) {
                self.err(format!("aggregate function {variable}() is not supported"))
            } else {
                self.err(format!("function call {variable}() is not supported"))
            };
        }
        let property = if self.eat(&Tok::Dot) {
            match self.identifier() {
                Some(p) => Some(p),
                None => return self.err("expected a property name after '.'"),
            }
        } else {
            None
        };
        if self.at_keyword("AS") {
            self.pos += 1;
            if self.identifier().is_none() {
                return self.err("expected an alias after AS");
            }
        }
        Ok(ReturnItem { variable, property })
    }
}

fn apply_equalities(src: &str, query: &mut CypherQuery, equalities: Vec<NameEquality>) -> Result<(), ParseError> {
    for eq in equalities {
        let refs: Vec<_> = query
            .node_refs()
            .into_iter()
            .filter(|r| query.node(*r).variable.as_deref() == Some(eq.variable.as_str()))
            .collect();
        if refs.is_empty() {
            return Err(ParseError::at(src, eq.offset, format!("WHERE refers to unknown variable '{}'", eq.variable)));
        }
        let existing = refs.iter().find_map(|r| query.node(*r).name.clone());
        match existing {
            Some(n) if n == eq.name => {}
            Some(n) => {
                return Err(ParseError::at(
                    src,
                    eq.offset,
                    format!("conflicting name filters for '{}': \"{n}\" and \"{}\"", eq.variable, eq.name),
                ))
            }
            None => query.node_mut(refs[0]).name = Some(eq.name),
        }
    }
    Ok(())
}

fn punct(t: &Tok) -> String {
    match t {
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
        Tok::LBracket => "[".into(),
        Tok::RBracket => "]".into(),
        Tok::LBrace => "{".into(),
        Tok::RBrace => "}".into(),
        Tok::Colon => ":".into(),
        Tok::Comma => ",".into(),
        Tok::Dot => ".".into(),
        Tok::Dash => "-".into(),
        Tok::Lt => "<".into(),
        Tok::Gt => ">".into(),
        Tok::Star => "*".into(),
        Tok::Eq => "=".into(),
        Tok::Semi => ";".into(),
        Tok::Pipe => "|".into(),
        Tok::Other(c) => c.to_string(),
        Tok::Word(w) | Tok::Quoted(w) | Tok::Str(w) | Tok::Number(w) => w.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAULTY: &str = "MATCH (d:pathway {name:\"multiple sclerosis\"})-[:contraindication]->(dr:drug)\nRETURN dr;";

    #[test]
    fn worked_example_faulty_query() {
        let q = parse_query(FAULTY).unwrap();
        assert_eq!(q.patterns.len(), 1);
        let p = &q.patterns[0];
        assert_eq!(p.node_count(), 2);
        assert_eq!(p.start, NodePattern::new(Some("d"), Some("pathway"), Some("multiple sclerosis")));
        assert_eq!(p.rel(0), &RelPattern::new("contraindication", Direction::LeftToRight));
        assert_eq!(p.node(1), &NodePattern::new(Some("dr"), Some("drug"), None));
        assert_eq!(q.return_items, vec![ReturnItem::new("dr", None)]);
    }

    #[test]
    fn where_equality_normalizes_to_inline_filter() {
        let a = parse_query("MATCH (a:x) WHERE a.name = \"q\" RETURN a.name").unwrap();
        let b = parse_query("MATCH (a:x {name:\"q\"}) RETURN a.name").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn where_conjunction_over_two_variables() {
        let a = parse_query("match (a:x)-[:r]->(b:y) where a.name = 'p' and b.name = \"q\" return b.name").unwrap();
        let b = parse_query("MATCH (a:x {name:\"p\"})-[:r]->(b:y {name:\"q\"}) RETURN b.name").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn asterisk_rejected() {
        let err = parse_query("MATCH (a)-[:r*]->(b) RETURN b.name").unwrap_err();
        assert!(err.message.contains("asterisk"), "{err}");
        assert_eq!(err.offset, 13);
        let err = parse_query("MATCH (a)-[:r*1..3]->(b) RETURN b.name").unwrap_err();
        assert!(err.message.contains("asterisk"));
        let err = parse_query("MATCH (a)-[*]->(b) RETURN b.name").unwrap_err();
        assert!(err.message.contains("asterisk"));
    }

    #[test]
    fn unsupported_clauses() {
        for (text, needle) in [
            ("CREATE (a:x) RETURN a", "CREATE"),
            ("MATCH (a:x) DELETE a", "DELETE"),
            ("MATCH (a:x) WITH a RETURN a.name", "WITH"),
            ("MATCH (a:x) RETURN count(a)", "aggregate"),
            ("MATCH (a:x) RETURN a.name LIMIT 5", "LIMIT"),
            ("OPTIONAL MATCH (a:x) RETURN a.name", "OPTIONAL"),
        ] {
            let err = parse_query(text).unwrap_err();
            assert!(err.message.contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn non_equality_where_rejected() {
        for text in [
            "MATCH (a:x) WHERE a.name <> \"q\" RETURN a.name",
            "MATCH (a:x) WHERE a.name CONTAINS \"q\" RETURN a.name",
            "MATCH (a:x) WHERE a.name = \"q\" OR a.name = \"r\" RETURN a.name",
            "MATCH (a:x) WHERE a.age = \"3\" RETURN a.name",
        ] {
            assert!(parse_query(text).is_err(), "{text}");
        }
    }

    #[test]
    fn unterminated_string() {
        let err = parse_query("MATCH (a:x {name:\"q}) RETURN a").unwrap_err();
        assert!(err.message.contains("unterminated"));
        assert_eq!((err.line, err.column), (1, 18));
    }

    #[test]
    fn multiple_match_clauses_flatten() {
        let q = parse_query("MATCH (a:x)-[:r]->(b:y)\nMATCH (b)<-[:s]-(c:z), (c)-[:t]->(d:w)\nRETURN d.name, a.name")
            .unwrap();
        assert_eq!(q.patterns.len(), 3);
        assert_eq!(q.return_items.len(), 2);
    }

    #[test]
    fn backtick_names() {
        let q = parse_query("MATCH (g:`gene/protein`)-[:`protein-protein interaction`]->(h) RETURN h.name").unwrap();
        assert_eq!(q.patterns[0].start.label.as_deref(), Some("gene/protein"));
        assert_eq!(q.patterns[0].rel(0).relation, "protein-protein interaction");
    }

    #[test]
    fn distinct_and_alias() {
        let q = parse_query("MATCH (a:x) RETURN DISTINCT a.name AS n").unwrap();
        assert!(q.distinct);
        assert_eq!(q.return_items, vec![ReturnItem::name_of("a")]);
    }

    #[test]
    fn structural_errors() {
        for text in [
            "",
            "RETURN a",
            "MATCH (a:x)",
            "MATCH (a:x)-[:r]-(b) RETURN b.name",
            "MATCH (a:x)<-[:r]->(b) RETURN b.name",
            "MATCH (a:x)-->(b) RETURN b.name",
            "MATCH (a:x:y) RETURN a.name",
            "MATCH (a {age: 3}) RETURN a.name",
            "MATCH () RETURN a",
            "MATCH (a:x) WHERE b.name = \"q\" RETURN a.name",
            "MATCH (a:x {name:\"p\"}) WHERE a.name = \"q\" RETURN a.name",
            "MATCH (a:x)-[:r|s]->(b) RETURN b.name",
            "MATCH p = (a:x) RETURN a.name",
            "MATCH (a:x) RETURN *",
        ] {
            assert!(parse_query(text).is_err(), "should fail: {text:?}");
        }
    }

    #[test]
    fn keywords_case_insensitive_identifiers_not() {
        let q = parse_query("match (A:Drug) return A.name").unwrap();
        assert_eq!(q.patterns[0].start.variable.as_deref(), Some("A"));
        assert_eq!(q.patterns[0].start.label.as_deref(), Some("Drug"));
    }
}
