//! Identifier quoting shared by the Cypher serializer and the schema renderer.

use std::borrow::Cow;

/// Words the parser treats specially in at least one position. Identifiers
/// spelled like one of these are always backtick-quoted on output.
pub(crate) const RESERVED: &[&str] = &[
    "AND", "AS", "CALL", "CONTAINS", "CREATE", "DELETE", "DETACH", "DISTINCT", "ENDS", "FOREACH", "IN", "IS", "LIMIT",
    "LOAD", "MATCH", "MERGE", "NOT", "NULL", "OPTIONAL", "OR", "ORDER", "REMOVE", "RETURN", "SET", "SKIP", "STARTS",
    "UNION", "UNWIND", "WHERE", "WITH", "XOR", "YIELD",
];

pub(crate) fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|kw| kw.eq_ignore_ascii_case(word))
}

/// `true` for `[A-Za-z_][A-Za-z0-9_]*` that is not a reserved word.
pub fn is_plain_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_reserved(s)
}

/// Returns `s` unchanged when it is a plain identifier, otherwise wrapped in
/// backticks with embedded backticks doubled.
pub fn escape_identifier(s: &str) -> Cow<'_, str> {
    if is_plain_identifier(s) {
        Cow::Borrowed(s)
    } else {
        Cow::Owned(format!("`{}`", s.replace('`', "``")))
    }
}

/// Double-quoted string literal with `\`, `"` and control characters escaped.
pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_escaped() {
        assert_eq!(escape_identifier("disease"), "disease");
        assert_eq!(escape_identifier("gene/protein"), "`gene/protein`");
        assert_eq!(escape_identifier("side effect"), "`side effect`");
        assert_eq!(escape_identifier("2x"), "`2x`");
        assert_eq!(escape_identifier("match"), "`match`");
        assert_eq!(escape_identifier("a`b"), "`a``b`");
        assert_eq!(escape_identifier(""), "``");
    }

    #[test]
    fn quoting() {
        assert_eq!(quote_string("multiple sclerosis"), "\"multiple sclerosis\"");
        assert_eq!(quote_string("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}
