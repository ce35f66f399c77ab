//! The five question structures as slot layouts.
//!
//! A layout lists each path as a sequence of slot indices; a slot shared
//! between paths is the join point. Slot `ret` is the answer.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub slots: usize,
    pub paths: Vec<Vec<usize>>,
    pub ret: usize,
}

/// 1: one hop. 2: two-hop chain. 3: two one-hop paths meeting at the answer.
/// 4: three-hop chain. 5: a one-hop and a two-hop path meeting at the answer.
pub fn shape(structure: u8) -> Shape {
    match structure {
        1 => Shape { slots: 2, paths: vec![vec![0, 1]], ret: 1 },
        2 => Shape { slots: 3, paths: vec![vec![0, 1, 2]], ret: 2 },
        3 => Shape { slots: 3, paths: vec![vec![0, 2], vec![1, 2]], ret: 2 },
        4 => Shape { slots: 4, paths: vec![vec![0, 1, 2, 3]], ret: 3 },
        5 => Shape { slots: 4, paths: vec![vec![0, 3], vec![1, 2, 3]], ret: 3 },
        _ => panic!("structure must be 1..=5, got {structure}"),
    }
}

impl Shape {
    /// How many node occurrences refer to `slot`.
    pub fn occurrences(&self, slot: usize) -> usize {
        self.paths.iter().flatten().filter(|&&s| s == slot).count()
    }

    pub fn hops(&self) -> usize {
        self.paths.iter().map(|p| p.len() - 1).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_points() {
        assert_eq!(shape(3).occurrences(2), 2);
        assert_eq!(shape(5).occurrences(3), 2);
        assert_eq!(shape(4).hops(), 3);
    }
}
