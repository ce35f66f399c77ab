//! Generators and brute-force oracles for the test suites.
//!
//! Nothing here calls the executor or the checker; the oracles recompute
//! their answers from first principles so they can be compared against the
//! library.

pub mod ast;
pub mod corpus;
pub mod exec;
pub mod shapes;

pub use rand_chacha::ChaCha8Rng;

/// A seeded generator, so every failure can be replayed from its seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}
