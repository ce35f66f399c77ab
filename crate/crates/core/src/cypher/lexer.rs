use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Bare word: keyword or identifier.
    Word(String),
    /// Backtick-quoted identifier.
    Quoted(String),
    Str(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Dash,
    Lt,
    Gt,
    Star,
    Eq,
    Semi,
    Pipe,
    Other(char),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        // `//` line comments
        if c == '/' && src[offset..].starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let tok = match c {
            '(' => single(&mut chars, Tok::LParen),
            ')' => single(&mut chars, Tok::RParen),
            '[' => single(&mut chars, Tok::LBracket),
            ']' => single(&mut chars, Tok::RBracket),
            '{' => single(&mut chars, Tok::LBrace),
            '}' => single(&mut chars, Tok::RBrace),
            ':' => single(&mut chars, Tok::Colon),
            ',' => single(&mut chars, Tok::Comma),
            '.' => single(&mut chars, Tok::Dot),
            '-' => single(&mut chars, Tok::Dash),
            '<' => single(&mut chars, Tok::Lt),
            '>' => single(&mut chars, Tok::Gt),
            '*' => single(&mut chars, Tok::Star),
            '=' => single(&mut chars, Tok::Eq),
            ';' => single(&mut chars, Tok::Semi),
            '|' => single(&mut chars, Tok::Pipe),
            '"' | '\'' => {
                chars.next();
                Tok::Str(string_body(src, offset, c, &mut chars)?)
            }
            '`' => {
                chars.next();
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some((_, '`')) => {
                            if matches!(chars.peek(), Some((_, '`'))) {
                                chars.next();
                                name.push('`');
                            } else {
                                break;
                            }
                        }
                        Some((_, ch)) => name.push(ch),
                        None => return Err(ParseError::at(src, offset, "unterminated backtick identifier")),
                    }
                }
                Tok::Quoted(name)
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        num.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                Tok::Number(num)
            }
            c if c.is_alphabetic() || c == '_' || c == '$' => {
                let mut word = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '$' {
                        word.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                Tok::Word(word)
            }
            other => single(&mut chars, Tok::Other(other)),
        };
        out.push(Token { tok, offset });
    }
    Ok(out)
}

fn single(chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>, tok: Tok) -> Tok {
    chars.next();
    tok
}

fn string_body(
    src: &str,
    start: usize,
    quote: char,
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
) -> Result<String, ParseError> {
    let mut s = String::new();
    loop {
        match chars.next() {
            Some((_, c)) if c == quote => return Ok(s),
            Some((_, '\\')) => match chars.next() {
                Some((_, 'n')) => s.push('\n'),
                Some((_, 't')) => s.push('\t'),
                Some((_, 'r')) => s.push('\r'),
                Some((_, other)) => s.push(other),
                None => break,
            },
            Some((_, c)) => s.push(c),
            None => break,
        }
    }
    Err(ParseError::at(src, start, "unterminated string literal"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_strings() {
        assert_eq!(
            toks(r#"(a {name:'x\'y'})<-[:`gene/protein`]-"#),
            vec![
                Tok::LParen,
                Tok::Word("a".into()),
                Tok::LBrace,
                Tok::Word("name".into()),
                Tok::Colon,
                Tok::Str("x'y".into()),
                Tok::RBrace,
                Tok::RParen,
                Tok::Lt,
                Tok::Dash,
                Tok::LBracket,
                Tok::Colon,
                Tok::Quoted("gene/protein".into()),
                Tok::RBracket,
                Tok::Dash,
            ]
        );
    }

    #[test]
    fn unterminated_string_has_position() {
        let err = tokenize("MATCH (a {name:\"oops}) RETURN a").unwrap_err();
        assert_eq!(err.offset, 15);
        assert!(err.message.contains("unterminated string"));
    }

    #[test]
    fn doubled_backtick() {
        assert_eq!(toks("`a``b`"), vec![Tok::Quoted("a`b".into())]);
    }
}
