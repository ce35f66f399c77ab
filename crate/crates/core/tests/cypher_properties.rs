use proptest::prelude::*;

use graphqa_core::cypher::{extract_cypher_block, parse_query, serialize_query};
use graphqa_testkit::ast::{noncanonical_text, random_query, Vocabulary};
use graphqa_testkit::rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>(), structure in 1u8..=5) {
        let q = random_query(&mut rng(seed), structure, &Vocabulary::default());
        let text = serialize_query(&q);
        prop_assert_eq!(parse_query(&text).map_err(|e| e.to_string()), Ok(q.clone()), "{}", text);
        prop_assert_eq!(serialize_query(&q.clone()), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn alternative_spellings_parse_to_the_same_ast(seed in any::<u64>(), structure in 1u8..=5) {
        let mut r = rng(seed);
        let q = random_query(&mut r, structure, &Vocabulary::default());
        let text = noncanonical_text(&mut r, &q);
        prop_assert_eq!(parse_query(&text).map_err(|e| e.to_string()), Ok(q), "{}", text);
    }
}

fn llm_line() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("Here is the query:".to_string()),
        Just("```cypher".to_string()),
        Just("```".to_string()),
        Just("MATCH (a:drug)-[:target]->(g:`gene/protein`)".to_string()),
        Just("  match (d:disease {name:\"x\"})".to_string()),
        Just("RETURN g.name".to_string()),
        Just("WHERE a.name = \"b\" RETURN a.name".to_string()),
        Just("The RETURN clause lists the answers.".to_string()),
        "[a-zA-Z ]{0,20}",
    ]
}

proptest! {
    #[test]
    fn extraction_is_idempotent(lines in prop::collection::vec(llm_line(), 0..12)) {
        let text = lines.join("\n");
        if let Ok(once) = extract_cypher_block(&text) {
            prop_assert_eq!(extract_cypher_block(&once), Ok(once.clone()));
            prop_assert!(once.trim_start().to_uppercase().starts_with("MATCH"));
            prop_assert!(once.lines().last().unwrap().to_uppercase().contains("RETURN"));
        }
    }
}

#[test]
fn round_trip_covers_both_directions_and_escaping() {
    let vocab = Vocabulary::default();
    let mut r = rng(7);
    let (mut left, mut right, mut ticks) = (false, false, false);
    for i in 0..200 {
        let text = serialize_query(&random_query(&mut r, (i % 5) as u8 + 1, &vocab));
        left |= text.contains("]->");
        right |= text.contains("<-[");
        ticks |= text.contains("`gene/protein`") || text.contains("`side effect`");
    }
    assert!(left && right && ticks);
}

#[test]
fn alternative_spellings_exercise_every_variation() {
    let vocab = Vocabulary::default();
    let mut r = rng(11);
    let (mut where_clause, mut two_matches, mut semicolon, mut lowercase) = (false, false, false, false);
    for i in 0..300 {
        let q = random_query(&mut r, (i % 5) as u8 + 1, &vocab);
        let text = noncanonical_text(&mut r, &q);
        let lower = text.to_lowercase();
        where_clause |= lower.contains(" where ") || lower.contains("\n  where ");
        two_matches |= lower.matches("match ").count() + lower.matches("match\n").count() >= 2;
        semicolon |= text.ends_with(';');
        lowercase |= text.starts_with("match");
    }
    assert!(where_clause && two_matches && semicolon && lowercase);
}
