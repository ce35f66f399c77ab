use std::collections::BTreeSet;

use super::{Correction, CorrectionStage, DefectKind, UnresolvedDefect};
use crate::cypher::{serialize_node, serialize_return_item, CypherQuery, NodeRef, ReturnItem};

/// Rewrites every return item to `var.name`, and binds a single unbound
/// return variable to the single variable-less node when that pairing is
/// unambiguous. Any other unbound return variable is left as a defect.
pub fn syntax_node_check(query: &CypherQuery) -> (CypherQuery, Vec<Correction>, Vec<UnresolvedDefect>) {
    let mut q = query.clone();
    let mut corrections = Vec::new();
    let mut unresolved = Vec::new();

    for item in &mut q.return_items {
        if item.property.as_deref() == Some("name") {
            continue;
        }
        let before = serialize_return_item(item);
        let description = match &item.property {
            None => format!("return the name property of '{}' instead of the whole node", item.variable),
            Some(p) => format!("nodes only carry 'name'; replaced '{}.{p}'", item.variable),
        };
        *item = ReturnItem::name_of(&item.variable);
        corrections.push(Correction {
            stage: CorrectionStage::SyntaxReturn,
            description,
            before,
            after: serialize_return_item(item),
        });
    }

    let unbound: BTreeSet<String> =
        q.return_items.iter().filter(|i| !q.binds(&i.variable)).map(|i| i.variable.clone()).collect();
    let anonymous: Vec<NodeRef> = q.node_refs().into_iter().filter(|&at| q.node(at).variable.is_none()).collect();

    if unbound.len() == 1 && anonymous.len() == 1 {
        let var = unbound.into_iter().next().unwrap_or_default();
        let at = anonymous[0];
        let before = serialize_node(q.node(at));
        q.node_mut(at).variable = Some(var.clone());
        corrections.push(Correction {
            stage: CorrectionStage::SyntaxBinding,
            description: format!("bound return variable '{var}' to the only unnamed node"),
            before,
            after: serialize_node(q.node(at)),
        });
    } else {
        for var in unbound {
            unresolved.push(UnresolvedDefect::new(
                DefectKind::UnboundReturnVariable,
                format!("return variable '{var}' is not bound in MATCH"),
            ));
        }
    }
    (q, corrections, unresolved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cypher::{parse_query, serialize_query};

    fn run(text: &str) -> (String, Vec<Correction>, Vec<UnresolvedDefect>) {
        let (q, c, u) = syntax_node_check(&parse_query(text).unwrap());
        (serialize_query(&q), c, u)
    }

    #[test]
    fn bare_variable_gets_name() {
        let (out, c, u) = run("MATCH (a:drug)-[:indication]->(b:disease) RETURN a, b.name");
        assert_eq!(out.lines().nth(1), Some("RETURN a.name, b.name"));
        assert_eq!(c.len(), 1);
        assert!(u.is_empty());
    }

    #[test]
    fn other_property_becomes_name() {
        let (out, c, _) = run("MATCH (a:drug) RETURN a.id");
        assert!(out.ends_with("RETURN a.name"));
        assert_eq!(c[0].before, "a.id");
    }

    #[test]
    fn binds_single_unnamed_node() {
        let (out, c, u) = run("MATCH (:disease {name:\"x\"})<-[:indication]-(:drug) RETURN d.name");
        // two anonymous nodes: ambiguous, so nothing is bound
        assert!(c.is_empty());
        assert_eq!(u[0].kind, DefectKind::UnboundReturnVariable);
        assert!(out.contains("(:drug)"));

        let (out, c, u) = run("MATCH (m:disease {name:\"x\"})<-[:indication]-(:drug) RETURN d.name");
        assert!(u.is_empty());
        assert_eq!(c[0].stage, CorrectionStage::SyntaxBinding);
        assert_eq!(c[0].after, "(d:drug)");
        assert!(out.contains("(d:drug)"));
    }

    #[test]
    fn truncated_path_is_unresolved() {
        let (_, c, u) = run("MATCH (m:disease {name:\"x\"})<-[:indication]-(d:drug) RETURN g.name");
        assert!(c.is_empty());
        assert_eq!(u.len(), 1);
    }
}
