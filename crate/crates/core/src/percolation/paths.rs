//! Leftmost/rightmost open paths, the three-way edge partition a path
//! induces, and the "more leftish" order.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::{connects, Configuration, Path, PercolationError};
use crate::graph::{BoundaryCycle, Dart, EdgeIndex, MixedPlanarGraph, Normalized, VertexIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSide {
    OnPath,
    Left,
    Right,
}

/// `E(π)`, `E_L(π)` and `E_R(π)` as edge bit sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPartition {
    pub on_path: FixedBitSet,
    pub left: FixedBitSet,
    pub right: FixedBitSet,
}

impl PathPartition {
    pub fn side_of(&self, e: EdgeIndex) -> EdgeSide {
        if self.on_path.contains(e) {
            EdgeSide::OnPath
        } else if self.left.contains(e) {
            EdgeSide::Left
        } else {
            EdgeSide::Right
        }
    }

    pub fn side(&self, side: Side) -> &FixedBitSet {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Out-darts at `v` in the order the scan for `side` tries them.
///
/// After arriving along `back.twin()`, the left scan turns clockwise from
/// `back` (sharpest left turn first) and the right scan counterclockwise. At
/// the start vertex the scan begins from the outer face, so the left scan
/// tries the outer dart that keeps the outer face on its left first.
fn scan_order(g: &MixedPlanarGraph, v: VertexIndex, back: Option<Dart>, side: Side) -> Vec<Dart> {
    let rot = g.rotation().expect("embedded graph");
    let faces = g.faces().expect("embedded graph");
    let around = rot.around(v);
    if around.is_empty() {
        return Vec::new();
    }
    let deg = around.len();
    match (back, side) {
        (Some(b), Side::Left) => rot.cw_from(b).collect(),
        (Some(b), Side::Right) => rot.ccw_from(b).collect(),
        (None, _) => {
            let outer = faces.outer();
            let first = match side {
                Side::Left => around.iter().copied().find(|&d| faces.face_of(d) == outer),
                Side::Right => around.iter().copied().find(|&d| faces.face_of(d.twin()) == outer),
            };
            match (first, side) {
                (Some(d), Side::Left) => std::iter::once(d).chain(rot.cw_from(d).take(deg - 1)).collect(),
                (Some(d), Side::Right) => std::iter::once(d).chain(rot.ccw_from(d).take(deg - 1)).collect(),
                (None, Side::Left) => around.iter().rev().copied().collect(),
                (None, Side::Right) => around.to_vec(),
            }
        }
    }
}

/// Whether `to` can be reached from `from` along open edges without
/// entering any vertex of `blocked`.
fn reaches_avoiding(
    g: &MixedPlanarGraph,
    omega: &Configuration,
    from: VertexIndex,
    to: VertexIndex,
    blocked: &FixedBitSet,
    seen: &mut FixedBitSet,
    stack: &mut Vec<VertexIndex>,
) -> bool {
    seen.clear();
    stack.clear();
    seen.insert(from);
    stack.push(from);
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for &(e, next) in g.out_edges(v) {
            if omega.is_open(e) && !blocked.contains(next) && !seen.put(next) {
                stack.push(next);
            }
        }
    }
    false
}

/// The leftmost or rightmost open self-avoiding path from `u` to `w`, or
/// `None` when `u` does not reach `w`.
///
/// Greedy wall-following with lookahead: at each vertex the scan for `side`
/// takes the first open out-edge from which `w` is still reachable without
/// revisiting the path. Requires a graph built with planarity checks.
pub fn extreme_path(g: &MixedPlanarGraph, omega: &Configuration, u: VertexIndex, w: VertexIndex, side: Side) -> Option<Path> {
    if !connects(g, omega, &[u], &[w]) {
        return None;
    }
    let n = g.vertex_count();
    let mut visited = FixedBitSet::with_capacity(n);
    let mut seen = FixedBitSet::with_capacity(n);
    let mut stack = Vec::new();
    visited.insert(u);
    let mut path = Path { vertices: vec![u], edges: Vec::new() };
    let mut back = None;
    let mut cur = u;
    while cur != w {
        let mut step = None;
        'scan: for d in scan_order(g, cur, back, side) {
            let head = g.dart_head(d);
            if visited.contains(head) {
                continue;
            }
            for &e in g.dart_edges(d) {
                if omega.is_open(e)
                    && (head == w || reaches_avoiding(g, omega, head, w, &visited, &mut seen, &mut stack))
                {
                    step = Some((d, e, head));
                    break 'scan;
                }
            }
        }
        let (d, e, head) = step.expect("lookahead keeps the target reachable");
        visited.insert(head);
        path.vertices.push(head);
        path.edges.push(e);
        back = Some(d.twin());
        cur = head;
    }
    Some(path)
}

/// Splits the edges of `g` by the path `π`, whose ends must lie on the outer
/// face.
///
/// Edges sharing a segment with `π` are on the path. The rest are classified
/// by flooding the faces: the face on the left of each path dart is seeded
/// left, the one on its right is seeded right, and flooding crosses every
/// segment not on `π`. The outer face is split into one node per boundary
/// segment so the two outer arcs stay apart.
pub fn partition_edges(g: &MixedPlanarGraph, pi: &Path) -> Result<PathPartition, PercolationError> {
    let faces = g.faces()?;
    let darts = pi.darts(g).map_err(|e| PercolationError::InvalidPath(e.to_string()))?;
    if pi.edges.len() != darts.len() {
        return Err(PercolationError::InvalidPath("one edge per step is required".into()));
    }
    let mut on_vertex = FixedBitSet::with_capacity(g.vertex_count());
    for &v in &pi.vertices {
        if on_vertex.put(v) {
            return Err(PercolationError::InvalidPath("path revisits a vertex".into()));
        }
    }
    for ((&e, &d), w) in pi.edges.iter().zip(&darts).zip(pi.vertices.windows(2)) {
        if g.segment_of(e) != d.segment() || !g.edges()[e].allows(w[0], w[1]) {
            return Err(PercolationError::InvalidPath("edge does not match the step or its orientation".into()));
        }
    }
    let outer = faces.outer();
    let touches_outer =
        |v: VertexIndex| g.rotation().map(|r| r.around(v).iter().any(|&d| faces.face_of(d) == outer)).unwrap_or(false);
    if !touches_outer(pi.start()) || !touches_outer(pi.end()) {
        return Err(PercolationError::Partition("path ends must lie on the outer boundary".into()));
    }

    let nf = faces.len();
    let node = |d: Dart| if faces.face_of(d) == outer { nf + d.segment() } else { faces.face_of(d) };
    let nodes = nf + g.segments().len();
    let mut path_segment = FixedBitSet::with_capacity(g.segments().len());
    for d in &darts {
        path_segment.insert(d.segment());
    }

    let mut label: Vec<Option<Side>> = vec![None; nodes];
    let mut queue = VecDeque::new();
    for &d in &darts {
        for (n, side) in [(node(d), Side::Left), (node(d.twin()), Side::Right)] {
            match label[n] {
                None => {
                    label[n] = Some(side);
                    queue.push_back(n);
                }
                Some(s) if s != side => {
                    return Err(PercolationError::Partition("a face lies on both sides of the path".into()));
                }
                _ => {}
            }
        }
    }
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for s in (0..g.segments().len()).filter(|&s| !path_segment.contains(s)) {
        let (a, b) = (node(Dart(2 * s)), node(Dart(2 * s + 1)));
        adjacent[a].push(b);
        adjacent[b].push(a);
    }
    while let Some(n) = queue.pop_front() {
        let side = label[n];
        for &m in &adjacent[n] {
            match label[m] {
                None => {
                    label[m] = side;
                    queue.push_back(m);
                }
                s if s != side => {
                    return Err(PercolationError::Partition("flooding reaches both sides".into()));
                }
                _ => {}
            }
        }
    }

    let m = g.edge_count();
    let mut part = PathPartition {
        on_path: FixedBitSet::with_capacity(m),
        left: FixedBitSet::with_capacity(m),
        right: FixedBitSet::with_capacity(m),
    };
    for e in 0..m {
        let s = g.segment_of(e);
        if path_segment.contains(s) {
            part.on_path.insert(e);
            continue;
        }
        match label[node(Dart(2 * s))] {
            Some(Side::Left) => part.left.insert(e),
            Some(Side::Right) => part.right.insert(e),
            None => return Err(PercolationError::Partition(format!("edge {} is cut off from the path", g.edges()[e].id))),
        }
    }
    Ok(part)
}

/// Both extreme paths of a configuration in `Γ` and their partitions.
#[derive(Debug, Clone)]
pub struct Extremes {
    pub left: Path,
    pub right: Path,
    pub left_partition: PathPartition,
    pub right_partition: PathPartition,
}

impl Extremes {
    pub fn path(&self, side: Side) -> &Path {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn partition(&self, side: Side) -> &PathPartition {
        match side {
            Side::Left => &self.left_partition,
            Side::Right => &self.right_partition,
        }
    }
}

/// A normalized graph with one source `u` and one target `w` on its outer
/// cycle: the setting in which `Γ = {u → w}`, extreme paths and the
/// "more leftish" order are defined.
#[derive(Debug, Clone, Copy)]
pub struct PathSpace<'g> {
    graph: &'g MixedPlanarGraph,
    cycle: &'g BoundaryCycle,
    u: VertexIndex,
    w: VertexIndex,
}

impl<'g> PathSpace<'g> {
    pub fn new(graph: &'g MixedPlanarGraph, cycle: &'g BoundaryCycle) -> Result<Self, PercolationError> {
        if !graph.is_normalized() {
            return Err(PercolationError::NotNormalized);
        }
        graph.embedding()?;
        let (Some(u), Some(w)) = (cycle.source(), cycle.target()) else {
            return Err(PercolationError::NotSingleEnded);
        };
        Ok(Self { graph, cycle, u, w })
    }

    pub fn from_normalized(n: &'g Normalized) -> Self {
        Self::new(&n.graph, &n.cycle).expect("normalize produces a valid path space")
    }

    pub fn graph(&self) -> &'g MixedPlanarGraph {
        self.graph
    }

    pub fn cycle(&self) -> &'g BoundaryCycle {
        self.cycle
    }

    pub fn source(&self) -> VertexIndex {
        self.u
    }

    pub fn target(&self) -> VertexIndex {
        self.w
    }

    fn check(&self, omega: &Configuration) -> Result<(), PercolationError> {
        if omega.len() != self.graph.edge_count() {
            return Err(PercolationError::WrongLength { expected: self.graph.edge_count(), found: omega.len() });
        }
        Ok(())
    }

    /// Membership in `Γ`.
    pub fn in_gamma(&self, omega: &Configuration) -> bool {
        connects(self.graph, omega, &[self.u], &[self.w])
    }

    pub fn extreme_path(&self, omega: &Configuration, side: Side) -> Option<Path> {
        extreme_path(self.graph, omega, self.u, self.w, side)
    }

    pub fn partition(&self, pi: &Path) -> Result<PathPartition, PercolationError> {
        partition_edges(self.graph, pi)
    }

    pub fn extremes(&self, omega: &Configuration) -> Result<Extremes, PercolationError> {
        self.check(omega)?;
        let left = self.extreme_path(omega, Side::Left).ok_or(PercolationError::NotInGamma)?;
        let right = self.extreme_path(omega, Side::Right).ok_or(PercolationError::NotInGamma)?;
        let left_partition = self.partition(&left)?;
        let right_partition = self.partition(&right)?;
        Ok(Extremes { left, right, left_partition, right_partition })
    }

    /// Whether `hat` is more leftish than `omega`.
    pub fn is_more_leftish(&self, hat: &Configuration, omega: &Configuration) -> Result<bool, PercolationError> {
        let (xh, x) = (self.extremes(hat)?, self.extremes(omega)?);
        Ok(more_leftish_given(hat, &xh, omega, &x))
    }
}

/// The order test on precomputed extremes: `(a)` the leftmost path of `hat`
/// lies weakly left of that of `omega` and the rightmost path of `omega`
/// weakly right of that of `hat`; `(b)` `hat ≥ omega` left of `π_L(hat)` and
/// `hat ≤ omega` right of `π_R(omega)`.
pub fn more_leftish_given(hat: &Configuration, xh: &Extremes, omega: &Configuration, x: &Extremes) -> bool {
    let weakly = |edges: &[EdgeIndex], part: &PathPartition, side: &FixedBitSet| {
        edges.iter().all(|&e| part.on_path.contains(e) || side.contains(e))
    };
    let a = weakly(&xh.left.edges, &x.left_partition, &x.left_partition.left)
        && weakly(&x.right.edges, &xh.right_partition, &xh.right_partition.right);
    if !a {
        return false;
    }
    xh.left_partition.left.ones().all(|e| hat.is_open(e) || !omega.is_open(e))
        && x.right_partition.right.ones().all(|e| !hat.is_open(e) || omega.is_open(e))
}
