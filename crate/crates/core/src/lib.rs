pub mod benchmark;
pub mod checker;
pub mod cypher;
pub mod fixture;
pub mod graph;
mod ident;
pub mod llm;
pub mod pipeline;

pub use ident::{escape_identifier, is_plain_identifier};
