use super::{Correction, CorrectionStage, DefectKind, UnresolvedDefect};
use crate::cypher::{serialize_rel, CypherQuery, Direction, NodeRef};
use crate::graph::GraphSchema;

enum Verdict {
    Ok,
    Flip,
    Defect(UnresolvedDefect),
}

fn judge(query: &CypherQuery, schema: &GraphSchema, pattern: usize, hop: usize) -> Verdict {
    let rel = query.patterns[pattern].rel(hop);
    let left = query.effective_label(NodeRef { pattern, position: hop });
    let right = query.effective_label(NodeRef { pattern, position: hop + 1 });
    // labels outside the schema are reported by the node stage
    if left.into_iter().chain(right).any(|l| !schema.has_label(l)) {
        return Verdict::Ok;
    }
    let r = rel.relation.as_str();
    if !schema.has_relation(r) {
        return Verdict::Defect(UnresolvedDefect::new(
            DefectKind::UnknownRelation,
            format!("relationship type '{r}' is not in the schema"),
        ));
    }
    let (src, dst) = match rel.direction {
        Direction::LeftToRight => (left, right),
        Direction::RightToLeft => (right, left),
    };
    let (forward, backward) = match (src, dst) {
        (Some(a), Some(b)) => (schema.has_triple(a, r, b), schema.has_triple(b, r, a)),
        (Some(a), None) => (schema.has_source(r, a), schema.has_target(r, a)),
        (None, Some(b)) => (schema.has_target(r, b), schema.has_source(r, b)),
        (None, None) => (true, false),
    };
    if forward {
        Verdict::Ok
    } else if backward {
        Verdict::Flip
    } else {
        let show = |l: Option<&str>| l.unwrap_or("?").to_string();
        Verdict::Defect(UnresolvedDefect::new(
            DefectKind::NoCompatibleRelation,
            format!("'{r}' does not connect {} and {} in either direction", show(src), show(dst)),
        ))
    }
}

/// Issue with a relationship as written (a needed flip counts as an issue).
pub(super) fn orientation_issue(
    query: &CypherQuery,
    schema: &GraphSchema,
    pattern: usize,
    hop: usize,
) -> Option<UnresolvedDefect> {
    match judge(query, schema, pattern, hop) {
        Verdict::Ok => None,
        Verdict::Flip => Some(UnresolvedDefect::new(
            DefectKind::NoCompatibleRelation,
            format!("'{}' is written against its schema direction", query.patterns[pattern].rel(hop).relation),
        )),
        Verdict::Defect(d) => Some(d),
    }
}

/// Flips every relationship whose direction contradicts the schema while the
/// reverse direction exists. Same-label relations present both ways are
/// always accepted as written.
pub fn relation_direction_check(
    query: &CypherQuery,
    schema: &GraphSchema,
) -> (CypherQuery, Vec<Correction>, Vec<UnresolvedDefect>) {
    let mut q = query.clone();
    let mut corrections = Vec::new();
    let mut unresolved = Vec::new();
    for p in 0..q.patterns.len() {
        for hop in 0..q.patterns[p].hops.len() {
            match judge(&q, schema, p, hop) {
                Verdict::Ok => {}
                Verdict::Defect(d) => unresolved.push(d),
                Verdict::Flip => {
                    let rel = &mut q.patterns[p].hops[hop].0;
                    let before = serialize_rel(rel);
                    rel.direction = rel.direction.flipped();
                    corrections.push(Correction {
                        stage: CorrectionStage::RelationDirection,
                        description: format!("'{}' only exists in the opposite direction", rel.relation),
                        before,
                        after: serialize_rel(rel),
                    });
                }
            }
        }
    }
    (q, corrections, unresolved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::fixtures::ms;
    use crate::cypher::parse_query;
    use crate::graph::{derive_schema, test_support::graph};

    fn check(text: &str, schema: &GraphSchema) -> (CypherQuery, Vec<Correction>, Vec<UnresolvedDefect>) {
        relation_direction_check(&parse_query(text).unwrap(), schema)
    }

    #[test]
    fn flips_reversed() {
        let (schema, _) = ms();
        let (q, c, u) = check("MATCH (d:disease)-[:indication]->(x:drug) RETURN x.name", &schema);
        assert!(u.is_empty());
        assert_eq!(c.len(), 1);
        assert_eq!(q.patterns[0].rel(0).direction, Direction::RightToLeft);
    }

    #[test]
    fn one_labelled_end() {
        let (schema, _) = ms();
        let (q, c, _) = check("MATCH (d:disease)-[:indication]->(x) RETURN x.name", &schema);
        assert_eq!(c.len(), 1);
        assert_eq!(q.patterns[0].rel(0).direction, Direction::RightToLeft);
        let (_, c, _) = check("MATCH (d)-[:indication]->(x:disease) RETURN d.name", &schema);
        assert!(c.is_empty());
        let (_, c, u) = check("MATCH (d)-[:indication]->(x) RETURN d.name", &schema);
        assert!(c.is_empty() && u.is_empty());
    }

    #[test]
    fn variable_label_used_for_bare_occurrence() {
        let (schema, _) = ms();
        let (_, c, _) = check("MATCH (x:drug), (d:disease)-[:indication]->(x) RETURN x.name", &schema);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn unknown_and_incompatible() {
        let (schema, _) = ms();
        let (_, c, u) = check("MATCH (d:disease)<-[:treats]-(x:drug) RETURN x.name", &schema);
        assert!(c.is_empty());
        assert_eq!(u[0].kind, DefectKind::UnknownRelation);
        let (_, _, u) = check("MATCH (d:phenotype)<-[:indication]-(x:drug) RETURN x.name", &schema);
        assert_eq!(u[0].kind, DefectKind::NoCompatibleRelation);
    }

    #[test]
    fn bidirectional_self_relation_never_flipped() {
        let g = graph(
            &[("1", "gene/protein", "APOE"), ("2", "gene/protein", "APP")],
            &[("1", "ppi", "2"), ("2", "ppi", "1")],
        );
        let schema = derive_schema(&g);
        for text in [
            "MATCH (a:`gene/protein`)-[:ppi]->(b:`gene/protein`) RETURN b.name",
            "MATCH (a:`gene/protein`)<-[:ppi]-(b:`gene/protein`) RETURN b.name",
        ] {
            let (_, c, u) = check(text, &schema);
            assert!(c.is_empty() && u.is_empty());
        }
    }
}
