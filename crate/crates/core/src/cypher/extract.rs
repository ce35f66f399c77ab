use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
pub enum ExtractError {
    #[error("no line starting with MATCH in the model output")]
    NoMatchFound,
    #[error("MATCH found but no RETURN line follows it")]
    NoReturnFound,
}

/// Pulls the query out of free-form model output: every line from the first
/// one that starts with `MATCH` (ignoring case and leading whitespace) through
/// the first line at or after it that contains the word `RETURN`.
///
/// Code-fence markers glued to the ends of the kept lines are dropped.
pub fn extract_cypher_block(llm_output: &str) -> Result<String, ExtractError> {
    let lines: Vec<&str> = llm_output.lines().collect();
    let start = lines.iter().position(|l| starts_with_match(l)).ok_or(ExtractError::NoMatchFound)?;
    let end = (start..lines.len()).find(|&i| contains_return(lines[i])).ok_or(ExtractError::NoReturnFound)?;
    let kept: Vec<&str> = lines[start..=end].iter().map(|l| strip_fences(l)).collect();
    Ok(kept.join("\n"))
}

fn starts_with_match(line: &str) -> bool {
    let t = line.trim_start();
    t.get(..5).is_some_and(|p| p.eq_ignore_ascii_case("match"))
        && !t[5..].starts_with(|c: char| c.is_alphanumeric() || c == '_')
}

fn contains_return(line: &str) -> bool {
    let upper = line.to_ascii_uppercase();
    upper.match_indices("RETURN").any(|(i, _)| {
        let before = upper[..i].chars().next_back();
        let after = upper[i + 6..].chars().next();
        let boundary = |c: Option<char>| !c.is_some_and(|c| c.is_alphanumeric() || c == '_');
        boundary(before) && boundary(after)
    })
}

fn strip_fences(line: &str) -> &str {
    let line = line.trim_end_matches(['\r']);
    let trimmed = line.trim_end();
    match trimmed.strip_suffix("```") {
        Some(rest) => rest.trim_end(),
        None => line,
    }
}
