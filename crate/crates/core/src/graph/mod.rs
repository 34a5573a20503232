//! Finite mixed graphs drawn with straight edges in the plane.
//!
//! Edges that join the same pair of vertices share one drawn segment, so
//! `(x, y)`, `(y, x)` and `{x, y}` are all orientations of one underlying
//! edge. Combinatorial planar structure (rotation system, faces) lives on
//! those segments and their two darts.

pub mod cycle;
pub mod embedding;
pub mod format;
pub mod geometry;
pub mod normalize;
pub mod samples;

use std::collections::HashMap;

use crate::scalar::Prob;
use embedding::Embedding;
use geometry::Point;

pub use cycle::{BoundaryCycle, Role};
pub use embedding::{Face, Faces, RotationSystem};
pub use format::{build_graph, GraphDescription};
pub use normalize::{normalize, Normalized};

/// Dense index into [`MixedPlanarGraph::vertices`].
pub type VertexIndex = usize;
/// Dense index into [`MixedPlanarGraph::edges`].
pub type EdgeIndex = usize;

/// One direction of a drawn segment. Dart `2s` runs from the lower to the
/// higher vertex index of segment `s`, dart `2s + 1` the other way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub usize);

impl Dart {
    pub fn segment(self) -> usize {
        self.0 / 2
    }

    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    pub fn is_forward(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: i64,
    pub pos: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: i64,
    pub tail: VertexIndex,
    pub head: VertexIndex,
    pub oriented: bool,
    pub p: Prob,
}

impl Edge {
    /// Whether an open copy of this edge lets a path step from `from` to `to`.
    pub fn allows(&self, from: VertexIndex, to: VertexIndex) -> bool {
        (self.tail == from && self.head == to) || (!self.oriented && self.tail == to && self.head == from)
    }
}

/// An underlying (undirected) edge of the drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Endpoints with `ends[0] < ends[1]`.
    pub ends: [VertexIndex; 2],
    pub edges: Vec<EdgeIndex>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0}")]
    DuplicateVertexId(i64),
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(i64),
    #[error("vertices {0} and {1} share the same coordinates")]
    DuplicateCoordinates(i64, i64),
    #[error("edge {edge} refers to unknown vertex {vertex}")]
    UnknownVertex { edge: i64, vertex: i64 },
    #[error("edge {0} is a self-loop")]
    SelfLoop(i64),
    #[error("edges {0} and {1} cross in the straight-line drawing")]
    Crossing(i64, i64),
    #[error("vertex {vertex} lies in the interior of edge {edge}")]
    VertexOnEdge { vertex: i64, edge: i64 },
    #[error("graph is disconnected when orientations are ignored")]
    Disconnected,
    #[error("graph was built without planarity validation, so it has no embedding")]
    NotEmbedded,
    #[error("face traversal is inconsistent: {0}")]
    FaceTraversal(String),
    #[error("Euler formula fails: V={vertices}, E={segments}, F={faces}")]
    Euler { vertices: usize, segments: usize, faces: usize },
    #[error("invalid boundary cycle: {0}")]
    InvalidCycle(String),
    #[error("apex vertex placement fails: {0}")]
    ApexPlacement(String),
}

/// A validated finite mixed graph with a straight-line drawing.
#[derive(Debug, Clone)]
pub struct MixedPlanarGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    segments: Vec<Segment>,
    edge_segment: Vec<usize>,
    dart_edges: Vec<Vec<EdgeIndex>>,
    out: Vec<Vec<(EdgeIndex, VertexIndex)>>,
    by_id: HashMap<i64, VertexIndex>,
    pair_segment: HashMap<(VertexIndex, VertexIndex), usize>,
    embedding: Option<Embedding>,
}

impl MixedPlanarGraph {
    /// Validates and assembles a graph whose edges already use vertex indices.
    ///
    /// With `require_planar` the drawing is checked for crossings and the
    /// rotation system and faces are computed; otherwise the graph carries
    /// no embedding (enough for connection events on non-planar graphs).
    pub fn new(vertices: Vec<Vertex>, mut edges: Vec<Edge>, require_planar: bool) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut by_id = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if by_id.insert(v.id, i).is_some() {
                return Err(GraphError::DuplicateVertexId(v.id));
            }
        }
        let mut coords: HashMap<(u64, u64), i64> = HashMap::with_capacity(vertices.len());
        for v in &vertices {
            let key = (v.pos.x.to_bits(), v.pos.y.to_bits());
            if let Some(&other) = coords.get(&key) {
                return Err(GraphError::DuplicateCoordinates(other, v.id));
            }
            coords.insert(key, v.id);
        }
        let mut edge_ids = HashMap::with_capacity(edges.len());
        for e in &mut edges {
            if edge_ids.insert(e.id, ()).is_some() {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
            for end in [e.tail, e.head] {
                if end >= vertices.len() {
                    return Err(GraphError::UnknownVertex { edge: e.id, vertex: end as i64 });
                }
            }
            if e.tail == e.head {
                return Err(GraphError::SelfLoop(e.id));
            }
            if !e.oriented && e.tail > e.head {
                std::mem::swap(&mut e.tail, &mut e.head);
            }
        }

        let mut segment_of_pair: HashMap<(VertexIndex, VertexIndex), usize> = HashMap::new();
        let mut segments: Vec<Segment> = Vec::new();
        let mut edge_segment = Vec::with_capacity(edges.len());
        for (ei, e) in edges.iter().enumerate() {
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            let s = *segment_of_pair.entry(key).or_insert_with(|| {
                segments.push(Segment { ends: [key.0, key.1], edges: Vec::new() });
                segments.len() - 1
            });
            segments[s].edges.push(ei);
            edge_segment.push(s);
        }

        let mut dart_edges = vec![Vec::new(); 2 * segments.len()];
        let mut out = vec![Vec::new(); vertices.len()];
        for (ei, e) in edges.iter().enumerate() {
            let s = edge_segment[ei];
            let forward = Dart(2 * s);
            let [lo, _] = segments[s].ends;
            let along = if e.tail == lo { forward } else { forward.twin() };
            dart_edges[along.0].push(ei);
            out[e.tail].push((ei, e.head));
            if !e.oriented {
                dart_edges[along.twin().0].push(ei);
                out[e.head].push((ei, e.tail));
            }
        }

        let mut graph = Self {
            vertices,
            edges,
            segments,
            edge_segment,
            dart_edges,
            out,
            by_id,
            pair_segment: segment_of_pair,
            embedding: None,
        };
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        if require_planar {
            graph.check_no_crossings()?;
            graph.embedding = Some(Embedding::compute(&graph)?);
        }
        Ok(graph)
    }

    fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for s in &self.segments {
            adj[s.ends[0]].push(s.ends[1]);
            adj[s.ends[1]].push(s.ends[0]);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    fn check_no_crossings(&self) -> Result<(), GraphError> {
        let label = |s: usize| self.edges[self.segments[s].edges[0]].id;
        for (si, s) in self.segments.iter().enumerate() {
            let (a, b) = (self.pos(s.ends[0]), self.pos(s.ends[1]));
            for (vi, v) in self.vertices.iter().enumerate() {
                if vi != s.ends[0] && vi != s.ends[1] && geometry::on_segment_interior(a, b, v.pos) {
                    return Err(GraphError::VertexOnEdge { vertex: v.id, edge: label(si) });
                }
            }
            for (ti, t) in self.segments.iter().enumerate().skip(si + 1) {
                let (c, d) = (self.pos(t.ends[0]), self.pos(t.ends[1]));
                let shared = s.ends.iter().find(|x| t.ends.contains(x)).copied();
                let bad = match shared {
                    Some(z) => {
                        let p = if s.ends[0] == z { b } else { a };
                        let q = if t.ends[0] == z { d } else { c };
                        geometry::overlap_at_shared_end(self.pos(z), p, q)
                    }
                    None => geometry::segments_intersect(a, b, c, d),
                };
                if bad {
                    return Err(GraphError::Crossing(label(si), label(ti)));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn pos(&self, v: VertexIndex) -> Point {
        self.vertices[v].pos
    }

    pub fn index_of(&self, id: i64) -> Option<VertexIndex> {
        self.by_id.get(&id).copied()
    }

    pub fn segment_of(&self, e: EdgeIndex) -> usize {
        self.edge_segment[e]
    }

    /// Segment joining `a` and `b`, if any.
    pub fn segment_between(&self, a: VertexIndex, b: VertexIndex) -> Option<usize> {
        self.pair_segment.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn dart_tail(&self, d: Dart) -> VertexIndex {
        let ends = self.segments[d.segment()].ends;
        if d.is_forward() {
            ends[0]
        } else {
            ends[1]
        }
    }

    pub fn dart_head(&self, d: Dart) -> VertexIndex {
        self.dart_tail(d.twin())
    }

    /// The dart `d` with `tail(d) = from`, `head(d) = to`.
    pub fn dart_from_to(&self, from: VertexIndex, to: VertexIndex) -> Option<Dart> {
        let s = self.segment_between(from, to)?;
        let d = Dart(2 * s);
        Some(if self.dart_tail(d) == from { d } else { d.twin() })
    }

    /// Edges that can be traversed along dart `d`.
    pub fn dart_edges(&self, d: Dart) -> &[EdgeIndex] {
        &self.dart_edges[d.0]
    }

    /// Dart drawn in the direction of edge `e` (tail to head).
    pub fn edge_dart(&self, e: EdgeIndex) -> Dart {
        let s = self.edge_segment[e];
        let d = Dart(2 * s);
        if self.dart_tail(d) == self.edges[e].tail {
            d
        } else {
            d.twin()
        }
    }

    /// `(edge, neighbour)` pairs an open edge lets a path take from `v`.
    pub fn out_edges(&self, v: VertexIndex) -> &[(EdgeIndex, VertexIndex)] {
        &self.out[v]
    }

    pub fn embedding(&self) -> Result<&Embedding, GraphError> {
        self.embedding.as_ref().ok_or(GraphError::NotEmbedded)
    }

    pub fn rotation(&self) -> Result<&RotationSystem, GraphError> {
        Ok(&self.embedding()?.rotation)
    }

    pub fn faces(&self) -> Result<&Faces, GraphError> {
        Ok(&self.embedding()?.faces)
    }

    /// `true` when every edge is oriented and each segment carries edges in both directions.
    pub fn is_normalized(&self) -> bool {
        self.edges.iter().all(|e| e.oriented) && (0..self.dart_edges.len()).all(|d| !self.dart_edges[d].is_empty())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn v(id: i64, x: f64, y: f64) -> Vertex {
        Vertex { id, pos: Point::new(x, y) }
    }

    pub fn e(id: i64, tail: usize, head: usize, oriented: bool, p: &str) -> Edge {
        Edge { id, tail, head, oriented, p: p.parse().unwrap() }
    }

    /// u(0,1), a(1,1), w(1,0), b(0,0) with four undirected edges, p = 1/2.
    pub fn square() -> MixedPlanarGraph {
        MixedPlanarGraph::new(
            vec![v(0, 0.0, 1.0), v(1, 1.0, 1.0), v(2, 1.0, 0.0), v(3, 0.0, 0.0)],
            vec![e(0, 0, 1, false, "1/2"), e(1, 1, 2, false, "1/2"), e(2, 2, 3, false, "1/2"), e(3, 3, 0, false, "1/2")],
            true,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn square_is_valid() {
        let g = square();
        assert_eq!(g.segments().len(), 4);
        assert_eq!(g.faces().unwrap().len(), 2);
        assert!(!g.is_normalized());
    }

    #[test]
    fn square_with_both_diagonals_is_rejected() {
        let err = MixedPlanarGraph::new(
            vec![v(0, 0.0, 1.0), v(1, 1.0, 1.0), v(2, 1.0, 0.0), v(3, 0.0, 0.0)],
            vec![
                e(0, 0, 1, false, "1/2"),
                e(1, 1, 2, false, "1/2"),
                e(2, 2, 3, false, "1/2"),
                e(3, 3, 0, false, "1/2"),
                e(4, 0, 2, false, "1/2"),
                e(5, 1, 3, false, "1/2"),
            ],
            true,
        )
        .unwrap_err();
        assert_eq!(err, GraphError::Crossing(4, 5));
    }

    #[test]
    fn validation_errors() {
        let two = || vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0)];
        assert_eq!(
            MixedPlanarGraph::new(vec![v(0, 0.0, 0.0), v(0, 1.0, 0.0)], vec![], false).unwrap_err(),
            GraphError::DuplicateVertexId(0)
        );
        assert_eq!(
            MixedPlanarGraph::new(vec![v(0, 0.0, 0.0), v(1, 0.0, 0.0)], vec![], false).unwrap_err(),
            GraphError::DuplicateCoordinates(0, 1)
        );
        assert_eq!(MixedPlanarGraph::new(two(), vec![], false).unwrap_err(), GraphError::Disconnected);
        assert_eq!(
            MixedPlanarGraph::new(two(), vec![e(0, 0, 0, true, "1")], false).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert_eq!(
            MixedPlanarGraph::new(two(), vec![e(0, 0, 1, true, "1"), e(0, 1, 0, true, "1")], false).unwrap_err(),
            GraphError::DuplicateEdgeId(0)
        );
        let collinear = MixedPlanarGraph::new(
            vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0), v(2, 2.0, 0.0)],
            vec![e(0, 0, 2, false, "1"), e(1, 0, 1, false, "1")],
            true,
        );
        assert!(matches!(collinear, Err(GraphError::VertexOnEdge { vertex: 1, .. })));
    }

    #[test]
    fn undirected_edges_are_canonical_and_share_segments() {
        let g = MixedPlanarGraph::new(
            vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0)],
            vec![e(0, 1, 0, false, "1/2"), e(1, 0, 1, true, "1/3"), e(2, 1, 0, true, "1/4")],
            true,
        )
        .unwrap();
        assert_eq!((g.edges()[0].tail, g.edges()[0].head), (0, 1));
        assert_eq!(g.segments().len(), 1);
        assert_eq!(g.dart_edges(Dart(0)), &[0, 1]);
        assert_eq!(g.dart_edges(Dart(1)), &[0, 2]);
        assert_eq!(g.edge_dart(2), Dart(1));
        assert_eq!(g.out_edges(1), &[(0, 0), (2, 0)]);
    }
}
