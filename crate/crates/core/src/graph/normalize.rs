//! Reduction of a boundary-cycled mixed graph to the all-directed form with a
//! single source `u` and a single target `w`.

use std::collections::BTreeSet;

use super::{BoundaryCycle, Edge, EdgeIndex, GraphError, MixedPlanarGraph, Role, Vertex, VertexIndex};
use crate::scalar::Prob;

/// Output of [`normalize`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub graph: MixedPlanarGraph,
    pub cycle: BoundaryCycle,
    /// Original edge behind each normalized edge; `None` for apex edges and
    /// for added zero-probability reverses.
    pub origin: Vec<Option<EdgeIndex>>,
    /// Apex vertices created for `U` and `W` (original vertices keep their indices).
    pub source_apex: Option<VertexIndex>,
    pub target_apex: Option<VertexIndex>,
}

impl Normalized {
    pub fn source(&self) -> VertexIndex {
        self.cycle.source().expect("normalized cycle has one source")
    }

    pub fn target(&self) -> VertexIndex {
        self.cycle.target().expect("normalized cycle has one target")
    }
}

/// Applies, in order: apex vertices for `|U| > 1` or `|W| > 1`; splitting of
/// every undirected edge into two independent directed copies; and a
/// probability-zero reverse for every directed edge that lacks one.
///
/// Apex edges are oriented away from the source apex and into the target
/// apex, so the connection law between original vertex sets is unchanged
/// while `P(u → w) = P(U → W)`.
pub fn normalize(g: &MixedPlanarGraph, cycle: &BoundaryCycle) -> Result<Normalized, GraphError> {
    let mut vertices = g.vertices().to_vec();
    let mut edges = g.edges().to_vec();
    let mut origin: Vec<Option<EdgeIndex>> = (0..edges.len()).map(Some).collect();
    let mut cycle_vertices = cycle.vertices().to_vec();
    let mut cycle_roles = cycle.roles().to_vec();
    let mut sources = cycle.sources().to_vec();
    let mut targets = cycle.targets().to_vec();
    let mut next_vertex_id = vertices.iter().map(|v| v.id).max().unwrap_or(0) + 1;
    let mut next_edge_id = edges.iter().map(|e| e.id).max().unwrap_or(0) + 1;

    let mut source_apex = None;
    let mut target_apex = None;
    let mut current = (g.clone(), cycle.clone());
    for role in [Role::U, Role::W] {
        let members = if role == Role::U { &sources } else { &targets };
        if members.len() < 2 {
            continue;
        }
        let (ref cg, ref cc) = current;
        let block: Vec<VertexIndex> = cc.block(role).into_iter().filter(|v| members.contains(v)).collect();
        let (first, last) = (block[0], *block.last().unwrap());
        let chord = cg.pos(last).sub(cg.pos(first));
        let reach = 0.5 * chord.norm();
        let apex_pos = cg.pos(first).midpoint(cg.pos(last)).add(chord.left_normal().scale(reach));
        let apex = vertices.len();
        vertices.push(Vertex { id: next_vertex_id, pos: apex_pos });
        next_vertex_id += 1;
        for &m in members {
            let (tail, head) = if role == Role::U { (apex, m) } else { (m, apex) };
            edges.push(Edge { id: next_edge_id, tail, head, oriented: true, p: Prob::one() });
            origin.push(None);
            next_edge_id += 1;
        }
        // Keep the outer walk from `last` round to `first`, then close through the apex.
        let n = cycle_vertices.len();
        let (i, j) = (cc.position(first).unwrap(), cc.position(last).unwrap());
        let keep = (j + n - i) % n;
        let mut new_vertices = Vec::with_capacity(n - keep + 2);
        let mut new_roles = Vec::with_capacity(n - keep + 2);
        for k in 0..=(n - keep) {
            let idx = (j + k) % n;
            new_vertices.push(cycle_vertices[idx]);
            new_roles.push(cycle_roles[idx]);
        }
        new_vertices.push(apex);
        new_roles.push(role);
        cycle_vertices = new_vertices;
        cycle_roles = new_roles;
        if role == Role::U {
            sources = vec![apex];
            source_apex = Some(apex);
        } else {
            targets = vec![apex];
            target_apex = Some(apex);
        }
        let placement = |e: GraphError| GraphError::ApexPlacement(e.to_string());
        let graph = MixedPlanarGraph::new(vertices.clone(), edges.clone(), true).map_err(placement)?;
        let cyc = BoundaryCycle::new(&graph, cycle_vertices.clone(), cycle_roles.clone(), sources.clone(), targets.clone())
            .map_err(placement)?;
        current = (graph, cyc);
    }

    let mut directed = Vec::with_capacity(2 * edges.len());
    let mut directed_origin = Vec::with_capacity(2 * edges.len());
    for (e, from) in edges.into_iter().zip(origin) {
        if e.oriented {
            directed.push(e);
            directed_origin.push(from);
        } else {
            let reverse = Edge { id: next_edge_id, tail: e.head, head: e.tail, oriented: true, p: e.p.clone() };
            next_edge_id += 1;
            directed.push(Edge { oriented: true, ..e });
            directed.push(reverse);
            directed_origin.push(from);
            directed_origin.push(from);
        }
    }
    let present: BTreeSet<(VertexIndex, VertexIndex)> = directed.iter().map(|e| (e.tail, e.head)).collect();
    let mut added = BTreeSet::new();
    let mut reverses = Vec::new();
    for e in &directed {
        let back = (e.head, e.tail);
        if !present.contains(&back) && added.insert(back) {
            reverses.push(Edge { id: next_edge_id, tail: back.0, head: back.1, oriented: true, p: Prob::zero() });
            next_edge_id += 1;
        }
    }
    directed_origin.extend(std::iter::repeat_n(None, reverses.len()));
    directed.extend(reverses);

    let graph = MixedPlanarGraph::new(vertices, directed, true)?;
    let cycle = BoundaryCycle::new(&graph, cycle_vertices, cycle_roles, sources, targets)?;
    Ok(Normalized { graph, cycle, origin: directed_origin, source_apex, target_apex })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use num_traits::Zero;

    #[test]
    fn undirected_edge_splits_into_two_copies() {
        let g = MixedPlanarGraph::new(
            vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0), v(2, 0.5, 1.0)],
            vec![e(0, 0, 1, false, "0.3"), e(1, 1, 2, true, "0.7"), e(2, 2, 0, true, "1")],
            true,
        )
        .unwrap();
        let c = BoundaryCycle::new(&g, vec![0, 2, 1], vec![Role::U, Role::A, Role::W], vec![0], vec![1]).unwrap();
        let n = normalize(&g, &c).unwrap();
        let edges = n.graph.edges();
        let find = |t: usize, h: usize| edges.iter().find(|e| e.tail == t && e.head == h).unwrap();
        assert_eq!(find(0, 1).p.to_string(), "3/10");
        assert_eq!(find(1, 0).p.to_string(), "3/10");
        assert_eq!(find(1, 2).p.to_string(), "7/10");
        assert!(find(2, 1).p.exact().is_zero());
        assert!(find(0, 2).p.exact().is_zero());
        assert!(n.graph.is_normalized());
        assert_eq!(n.origin[0], Some(0));
        assert_eq!(n.origin.iter().filter(|o| o.is_none()).count(), 2);
    }

    #[test]
    fn normalize_is_idempotent() {
        let g = square();
        let c = BoundaryCycle::new(&g, vec![0, 1, 2, 3], vec![Role::U, Role::U, Role::W, Role::W], vec![0, 1], vec![2, 3])
            .unwrap();
        let once = normalize(&g, &c).unwrap();
        let twice = normalize(&once.graph, &once.cycle).unwrap();
        assert_eq!(once.graph.edges(), twice.graph.edges());
        assert_eq!(once.graph.vertices(), twice.graph.vertices());
        assert_eq!(once.cycle, twice.cycle);
    }

    #[test]
    fn apexes_join_the_blocks_with_certain_edges() {
        let g = square();
        let c = BoundaryCycle::new(&g, vec![0, 1, 2, 3], vec![Role::U, Role::U, Role::W, Role::W], vec![0, 1], vec![2, 3])
            .unwrap();
        let n = normalize(&g, &c).unwrap();
        let (u, w) = (n.source(), n.target());
        assert_eq!(n.source_apex, Some(u));
        assert_eq!(n.target_apex, Some(w));
        // u sits above the top side, w below the bottom side.
        assert!(n.graph.pos(u).y > 1.0);
        assert!(n.graph.pos(w).y < 0.0);
        for m in [0, 1] {
            let e = n.graph.edges().iter().find(|e| e.tail == u && e.head == m).unwrap();
            assert!(e.p.exact() == &num_rational::BigRational::from_integer(1.into()));
        }
        assert_eq!(n.cycle.len(), 6);
    }
}
