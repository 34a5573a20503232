//! Bond configurations, oriented reachability and extreme open paths.

mod paths;

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::graph::{Dart, EdgeIndex, GraphError, MixedPlanarGraph, VertexIndex};

pub use paths::{extreme_path, more_leftish_given, partition_edges, EdgeSide, Extremes, PathPartition, PathSpace, Side};

/// One open/closed assignment to every edge of a graph (1 = open).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(FixedBitSet);

impl Configuration {
    pub fn all_closed(edges: usize) -> Self {
        Self(FixedBitSet::with_capacity(edges))
    }

    pub fn all_open(edges: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(edges);
        bits.insert_range(..);
        Self(bits)
    }

    /// Configuration whose bit `e` is bit `e` of `index` (needs `edges <= 64`).
    pub fn from_index(index: u64, edges: usize) -> Self {
        assert!(edges <= 64, "index encoding covers at most 64 edges");
        let mut bits = FixedBitSet::with_capacity(edges);
        for e in 0..edges {
            if index >> e & 1 == 1 {
                bits.insert(e);
            }
        }
        Self(bits)
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.len() <= 64, "index encoding covers at most 64 edges");
        self.0.ones().fold(0u64, |acc, e| acc | 1 << e)
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut set = FixedBitSet::with_capacity(bits.len());
        for (e, b) in bits.into_iter().enumerate() {
            set.set(e, b);
        }
        Self(set)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_open(&self, e: EdgeIndex) -> bool {
        self.0.contains(e)
    }

    pub fn set(&mut self, e: EdgeIndex, open: bool) {
        self.0.set(e, open);
    }

    pub fn open_edges(&self) -> impl Iterator<Item = EdgeIndex> + '_ {
        self.0.ones()
    }

    pub fn count_open(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }

    /// Bitwise complement, edge for edge.
    pub fn complement(&self) -> Self {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        Self(bits)
    }

    /// Hex digits, most significant nibble first; edge 0 is the lowest bit.
    pub fn to_hex(&self) -> String {
        let n = self.len();
        let nibbles = n.div_ceil(4).max(1);
        let mut out = String::with_capacity(nibbles);
        for k in (0..nibbles).rev() {
            let nib = (0..4).filter(|&b| 4 * k + b < n && self.is_open(4 * k + b)).fold(0u8, |acc, b| acc | 1 << b);
            let _ = write!(out, "{nib:x}");
        }
        out
    }
}

/// Independent Bernoulli(`p_e`) draw for every edge.
pub fn sample_config<R: Rng + ?Sized>(g: &MixedPlanarGraph, rng: &mut R) -> Configuration {
    let mut bits = FixedBitSet::with_capacity(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        if rng.random::<f64>() < e.p.as_f64() {
            bits.insert(i);
        }
    }
    Configuration(bits)
}

/// Vertices reachable from `sources` along open edges, respecting orientation.
pub fn reachable(g: &MixedPlanarGraph, omega: &Configuration, sources: &[VertexIndex]) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(g.vertex_count());
    let mut stack = Vec::with_capacity(g.vertex_count());
    for &s in sources {
        if !seen.put(s) {
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &(e, to) in g.out_edges(v) {
            if omega.is_open(e) && !seen.put(to) {
                stack.push(to);
            }
        }
    }
    seen
}

/// The event `{S → T}`.
pub fn connects(g: &MixedPlanarGraph, omega: &Configuration, sources: &[VertexIndex], targets: &[VertexIndex]) -> bool {
    let seen = reachable(g, omega, sources);
    targets.iter().any(|&t| seen.contains(t))
}

/// A self-avoiding path, stored as its vertex sequence and the edge used
/// for each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<VertexIndex>,
    pub edges: Vec<EdgeIndex>,
}

impl Path {
    pub fn start(&self) -> VertexIndex {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexIndex {
        *self.vertices.last().expect("paths are non-empty")
    }

    /// Darts traversed, in order.
    pub fn darts(&self, g: &MixedPlanarGraph) -> Result<Vec<Dart>, GraphError> {
        self.vertices
            .windows(2)
            .map(|w| g.dart_from_to(w[0], w[1]).ok_or(GraphError::InvalidCycle("path step is not an edge".into())))
            .collect()
    }

    /// Whether this is a self-avoiding open path that respects orientations.
    pub fn is_open_in(&self, g: &MixedPlanarGraph, omega: &Configuration) -> bool {
        if self.vertices.is_empty() || self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(g.vertex_count());
        if self.vertices.iter().any(|&v| seen.put(v)) {
            return false;
        }
        self.edges
            .iter()
            .zip(self.vertices.windows(2))
            .all(|(&e, w)| omega.is_open(e) && g.edges()[e].allows(w[0], w[1]))
    }
}

/// Every open self-avoiding path from `from` to `to`, by exhaustive DFS.
/// Exponential; meant for oracles on small graphs.
pub fn all_open_paths(g: &MixedPlanarGraph, omega: &Configuration, from: VertexIndex, to: VertexIndex) -> Vec<Path> {
    fn dfs(
        g: &MixedPlanarGraph,
        omega: &Configuration,
        to: VertexIndex,
        on: &mut FixedBitSet,
        current: &mut Path,
        out: &mut Vec<Path>,
    ) {
        let v = current.end();
        if v == to {
            out.push(current.clone());
            return;
        }
        for &(e, next) in g.out_edges(v) {
            if omega.is_open(e) && !on.contains(next) {
                on.insert(next);
                current.vertices.push(next);
                current.edges.push(e);
                dfs(g, omega, to, on, current, out);
                current.vertices.pop();
                current.edges.pop();
                on.set(next, false);
            }
        }
    }
    let mut on = FixedBitSet::with_capacity(g.vertex_count());
    on.insert(from);
    let mut current = Path { vertices: vec![from], edges: Vec::new() };
    let mut out = Vec::new();
    dfs(g, omega, to, &mut on, &mut current, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PercolationError {
    #[error("graph must be normalized (all edges directed, both directions present)")]
    NotNormalized,
    #[error("boundary cycle must have a single source and a single target")]
    NotSingleEnded,
    #[error("configuration has no open path from source to target")]
    NotInGamma,
    #[error("configuration has {found} bits but the graph has {expected} edges")]
    WrongLength { expected: usize, found: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("left/right partition is ill-defined: {0}")]
    Partition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn diamond_directed() -> MixedPlanarGraph {
        MixedPlanarGraph::new(
            vec![v(0, 0.0, 0.0), v(1, 1.0, 1.0), v(2, 2.0, 0.0), v(3, 1.0, -1.0)],
            vec![e(0, 0, 1, true, "1/2"), e(1, 1, 2, true, "1/2"), e(2, 0, 3, true, "1/2"), e(3, 3, 2, true, "1/2")],
            true,
        )
        .unwrap()
    }

    #[test]
    fn degenerate_probabilities_sample_deterministically() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let ones = MixedPlanarGraph::new(vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0)], vec![e(0, 0, 1, true, "1")], false).unwrap();
        let zeros = MixedPlanarGraph::new(vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0)], vec![e(0, 0, 1, true, "0")], false).unwrap();
        for _ in 0..100 {
            assert!(sample_config(&ones, &mut rng).is_open(0));
            assert!(!sample_config(&zeros, &mut rng).is_open(0));
        }
    }

    #[test]
    fn half_probability_frequency_is_within_three_standard_errors() {
        let g = square();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let w = sample_config(&g, &mut rng);
            for (e, c) in counts.iter_mut().enumerate() {
                *c += usize::from(w.is_open(e));
            }
        }
        let tol = 3.0 * (0.25f64 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.5).abs() < tol);
        }
    }

    #[test]
    fn reachability_respects_orientation() {
        let g = MixedPlanarGraph::new(vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0)], vec![e(0, 0, 1, true, "1/2")], false).unwrap();
        let open = Configuration::all_open(1);
        assert_eq!(reachable(&g, &open, &[0]).ones().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(reachable(&g, &open, &[1]).ones().collect::<Vec<_>>(), vec![1]);
        let closed = Configuration::all_closed(1);
        assert_eq!(reachable(&g, &closed, &[0]).ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn reachability_matches_path_enumeration_exhaustively() {
        let g = diamond_directed();
        for idx in 0..16 {
            let w = Configuration::from_index(idx, 4);
            let seen = reachable(&g, &w, &[0]);
            for x in 0..4 {
                let by_paths = x == 0 || !all_open_paths(&g, &w, 0, x).is_empty();
                assert_eq!(seen.contains(x), by_paths, "config {idx} vertex {x}");
            }
        }
    }

    #[test]
    fn hex_and_index_encodings() {
        let w = Configuration::from_index(0b1_0110, 5);
        assert_eq!(w.to_hex(), "16");
        assert_eq!(w.to_index(), 0b1_0110);
        assert_eq!(w.complement().to_index(), 0b0_1001);
        assert_eq!(Configuration::all_closed(0).to_hex(), "0");
        assert_eq!(Configuration::from_bits([true, false, true]).to_index(), 0b101);
    }

    #[test]
    fn open_path_check() {
        let g = diamond_directed();
        let w = Configuration::all_open(4);
        let paths = all_open_paths(&g, &w, 0, 2);
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| p.is_open_in(&g, &w)));
        let backwards = Path { vertices: vec![2, 1, 0], edges: vec![1, 0] };
        assert!(!backwards.is_open_in(&g, &w));
    }
}
