//! Repairs a faulty model-written query against a three-node graph and prints
//! every correction.
//!
//!     cargo run -p graphqa-core --example repair_query

use graphqa_core::checker::check_and_repair;
use graphqa_core::graph::{build_entity_index, derive_schema, GraphEdge, GraphNode, PropertyGraph};

fn main() {
    let graph = PropertyGraph::new(
        vec![
            GraphNode::new("d1", "disease", "multiple sclerosis"),
            GraphNode::new("r1", "drug", "natalizumab"),
            GraphNode::new("p1", "pathway", "immune response"),
        ],
        vec![GraphEdge::new("r1", "contraindication", "d1")],
    )
    .expect("ids are consistent");
    let (schema, index) = (derive_schema(&graph), build_entity_index(&graph));

    let faulty = r#"MATCH (d:pathway {name:"multiple sclerosis"})-[:contraindication]->(dr:drug) RETURN dr"#;
    let report = check_and_repair(faulty, &schema, &index);

    println!("in:\n{faulty}\n");
    for c in &report.corrections {
        println!("{:?}: {}\n    {}  =>  {}", c.stage, c.description, c.before, c.after);
    }
    println!("\nout:\n{}", report.output_query);
    if !report.unresolved.is_empty() {
        println!("unresolved: {:?}", report.unresolved);
    }
}
