use std::path::{Path, PathBuf};

use serde::Serialize;

/// Ids of the shipped query-generation prompts; `load_templates` requires
/// all of them and accepts extra `.txt` files alongside.
pub const STANDARD_TEMPLATES: [&str; 8] = [
    "zero_shot",
    "one_shot",
    "few_shot",
    "simple",
    "syntax_emphasis",
    "social_engineering",
    "expert_role",
    "llama3_custom",
];

const SCHEMA: &str = "{schema}";
const QUESTION: &str = "{question}";
const RESULTS: &str = "{results}";

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("cannot read template {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("template '{id}' must contain {placeholder} exactly once (found {count})")]
    Placeholder { id: String, placeholder: &'static str, count: usize },
    #[error("template directory {0} is missing '{1}'")]
    Missing(PathBuf, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptTemplate {
    pub id: String,
    pub body: String,
}

impl PromptTemplate {
    pub fn new(id: &str, body: &str) -> Result<Self, TemplateError> {
        for placeholder in [SCHEMA, QUESTION] {
            let count = body.matches(placeholder).count();
            if count != 1 {
                return Err(TemplateError::Placeholder { id: id.to_string(), placeholder, count });
            }
        }
        Ok(Self { id: id.to_string(), body: body.to_string() })
    }
}

/// Loads every `<id>.txt` in `dir`, sorted by id.
pub fn load_templates(dir: &Path) -> Result<Vec<PromptTemplate>, TemplateError> {
    let io = |source| TemplateError::Io { path: dir.to_path_buf(), source };
    let mut templates = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        let body = std::fs::read_to_string(&path).map_err(|source| TemplateError::Io { path: path.clone(), source })?;
        templates.push(PromptTemplate::new(id, &body)?);
    }
    templates.sort_by(|a, b| a.id.cmp(&b.id));
    for id in STANDARD_TEMPLATES {
        if !templates.iter().any(|t| t.id == id) {
            return Err(TemplateError::Missing(dir.to_path_buf(), id.to_string()));
        }
    }
    Ok(templates)
}

/// Prompt used to turn query results into one answer sentence. Holds
/// `{question}` and `{results}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnswerTemplate {
    pub body: String,
}

impl AnswerTemplate {
    pub fn new(body: &str) -> Result<Self, TemplateError> {
        for placeholder in [QUESTION, RESULTS] {
            let count = body.matches(placeholder).count();
            if count != 1 {
                return Err(TemplateError::Placeholder { id: "answer_sentence".into(), placeholder, count });
            }
        }
        Ok(Self { body: body.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, TemplateError> {
        let body =
            std::fs::read_to_string(path).map_err(|source| TemplateError::Io { path: path.to_path_buf(), source })?;
        Self::new(&body)
    }

    /// One `- result` line per result, verbatim; `(no results)` when empty.
    pub fn render(&self, question: &str, results: &[String]) -> String {
        let list = if results.is_empty() {
            "(no results)".to_string()
        } else {
            results.iter().map(|r| format!("- {r}")).collect::<Vec<_>>().join("\n")
        };
        substitute(&self.body, &[(QUESTION, question), (RESULTS, &list)])
    }
}

/// Query-generation templates plus the answer-sentence prompt, loaded from a
/// directory holding `cypher/*.txt` and `answer_sentence.txt`.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub cypher: Vec<PromptTemplate>,
    pub answer: AnswerTemplate,
}

impl TemplateSet {
    pub fn load(root: &Path) -> Result<Self, TemplateError> {
        Ok(Self {
            cypher: load_templates(&root.join("cypher"))?,
            answer: AnswerTemplate::load(&root.join("answer_sentence.txt"))?,
        })
    }

    pub fn get(&self, id: &str) -> Option<&PromptTemplate> {
        self.cypher.iter().find(|t| t.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.cypher.iter().map(|t| t.id.as_str()).collect()
    }
}

/// Substitutes `{schema}` and `{question}` in one pass and turns the
/// escaped braces `{{`/`}}` of the template text into literal braces.
/// Inserted text is copied verbatim, never rescanned.
pub fn render_prompt(template: &PromptTemplate, schema_text: &str, question: &str) -> String {
    substitute(&template.body, &[(SCHEMA, schema_text), (QUESTION, question)])
}

fn substitute(body: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(body.len() + values.iter().map(|v| v.1.len()).sum::<usize>());
    let mut rest = body;
    'scan: while let Some(c) = rest.chars().next() {
        for (placeholder, value) in values {
            if rest.starts_with(placeholder) {
                out.push_str(value);
                rest = &rest[placeholder.len()..];
                continue 'scan;
            }
        }
        let step = if rest.starts_with("{{") || rest.starts_with("}}") {
            out.push(c);
            2
        } else {
            out.push(c);
            c.len_utf8()
        };
        rest = &rest[step..];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution() {
        let t = PromptTemplate::new("t", "Schema:\n{schema}\nQ: {question}\n{{name:\"x\"}}").unwrap();
        assert_eq!(render_prompt(&t, "S", "Q"), "Schema:\nS\nQ: Q\n{name:\"x\"}");
    }

    #[test]
    fn inserted_text_not_rescanned() {
        let t = PromptTemplate::new("t", "{schema}|{question}").unwrap();
        assert_eq!(render_prompt(&t, "{{question}}", "{schema}"), "{{question}}|{schema}");
    }

    #[test]
    fn answer_prompt_lists_results() {
        let t = AnswerTemplate::new("Q={question}\nR:\n{results}").unwrap();
        assert_eq!(t.render("why?", &["a".into(), "b, c".into()]), "Q=why?\nR:\n- a\n- b, c");
        assert_eq!(t.render("why?", &[]), "Q=why?\nR:\n(no results)");
    }

    #[test]
    fn placeholder_counts_enforced() {
        assert!(PromptTemplate::new("t", "{schema}").is_err());
        assert!(PromptTemplate::new("t", "{schema}{question}{question}").is_err());
    }
}
