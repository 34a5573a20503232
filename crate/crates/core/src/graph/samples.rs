//! Small ready-made graphs with boundary cycles, used by tests, examples and
//! the command line.

use super::geometry::Point;
use super::{BoundaryCycle, Edge, MixedPlanarGraph, Role, Vertex};
use crate::scalar::Prob;

fn vertex(id: i64, x: f64, y: f64) -> Vertex {
    Vertex { id, pos: Point::new(x, y) }
}

fn undirected(id: i64, tail: usize, head: usize, p: &Prob) -> Edge {
    Edge { id, tail, head, oriented: false, p: p.clone() }
}

/// `u(0,0)`, `a(1,1)`, `w(2,0)`, `b(1,-1)` with undirected edges
/// `ua, aw, ub, bw`, all with probability `p`.
pub fn diamond(p: Prob) -> (MixedPlanarGraph, BoundaryCycle) {
    diamond_inner(p, false)
}

/// [`diamond`] plus the vertical chord `ab`.
pub fn diamond_with_chord(p: Prob) -> (MixedPlanarGraph, BoundaryCycle) {
    diamond_inner(p, true)
}

fn diamond_inner(p: Prob, chord: bool) -> (MixedPlanarGraph, BoundaryCycle) {
    let vertices = vec![vertex(0, 0.0, 0.0), vertex(1, 1.0, 1.0), vertex(2, 2.0, 0.0), vertex(3, 1.0, -1.0)];
    let mut edges = vec![undirected(0, 0, 1, &p), undirected(1, 1, 2, &p), undirected(2, 0, 3, &p), undirected(3, 3, 2, &p)];
    if chord {
        edges.push(undirected(4, 1, 3, &p));
    }
    let g = MixedPlanarGraph::new(vertices, edges, true).expect("diamond is planar");
    let c = BoundaryCycle::new(&g, vec![0, 1, 2, 3], vec![Role::U, Role::A, Role::W, Role::B], vec![0], vec![2])
        .expect("diamond cycle");
    (g, c)
}

/// Two poles `u(0,0)`, `w(2,0)` joined through `a(1,1)`, `m(1,0)` and
/// `b(1,-1)`; all edges undirected with probability `p`.
pub fn theta(p: Prob) -> (MixedPlanarGraph, BoundaryCycle) {
    let vertices =
        vec![vertex(0, 0.0, 0.0), vertex(1, 1.0, 1.0), vertex(2, 2.0, 0.0), vertex(3, 1.0, -1.0), vertex(4, 1.0, 0.0)];
    let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2)]
        .iter()
        .enumerate()
        .map(|(i, &(t, h))| undirected(i as i64, t, h, &p))
        .collect();
    let g = MixedPlanarGraph::new(vertices, edges, true).expect("theta is planar");
    let c = BoundaryCycle::new(&g, vec![0, 1, 2, 3], vec![Role::U, Role::A, Role::W, Role::B], vec![0], vec![2])
        .expect("theta cycle");
    (g, c)
}

/// [`grid`] with every horizontal edge oriented left to right.
pub fn eastward_grid(cols: usize, rows: usize, p: Prob) -> (MixedPlanarGraph, BoundaryCycle) {
    let (g, c) = grid(cols, rows, p);
    let vertices = g.vertices().to_vec();
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let horizontal = g.pos(e.tail).y == g.pos(e.head).y;
            Edge { oriented: horizontal, ..e.clone() }
        })
        .collect();
    let g = MixedPlanarGraph::new(vertices, edges, true).expect("grid is planar");
    let c = BoundaryCycle::new(&g, c.vertices().to_vec(), c.roles().to_vec(), c.sources().to_vec(), c.targets().to_vec())
        .expect("grid cycle");
    (g, c)
}

/// `cols × rows` square grid of undirected edges with probability `p`.
/// Vertex `(i, j)` has index `j * cols + i` and sits at `(i, j)`; `u` is the
/// bottom-left corner, `w` the top-right one, the a-block runs up the left
/// side and along the top, the b-block down the right side and along the
/// bottom.
pub fn grid(cols: usize, rows: usize, p: Prob) -> (MixedPlanarGraph, BoundaryCycle) {
    assert!(cols >= 2 && rows >= 2, "grid needs at least 2 × 2 vertices");
    let at = |i: usize, j: usize| j * cols + i;
    let vertices = (0..rows)
        .flat_map(|j| (0..cols).map(move |i| (i, j)))
        .map(|(i, j)| vertex(at(i, j) as i64, i as f64, j as f64))
        .collect();
    let mut edges = Vec::new();
    for j in 0..rows {
        for i in 0..cols {
            if i + 1 < cols {
                edges.push(undirected(edges.len() as i64, at(i, j), at(i + 1, j), &p));
            }
            if j + 1 < rows {
                edges.push(undirected(edges.len() as i64, at(i, j), at(i, j + 1), &p));
            }
        }
    }
    let g = MixedPlanarGraph::new(vertices, edges, true).expect("grid is planar");
    let mut cycle = Vec::new();
    cycle.extend((0..rows).map(|j| at(0, j)));
    cycle.extend((1..cols).map(|i| at(i, rows - 1)));
    cycle.extend((0..rows - 1).rev().map(|j| at(cols - 1, j)));
    cycle.extend((1..cols - 1).rev().map(|i| at(i, 0)));
    let w = at(cols - 1, rows - 1);
    let roles = cycle
        .iter()
        .map(|&v| match v {
            v if v == at(0, 0) => Role::U,
            v if v == w => Role::W,
            v if v % cols == 0 || v / cols == rows - 1 => Role::A,
            _ => Role::B,
        })
        .collect();
    let c = BoundaryCycle::new(&g, cycle, roles, vec![at(0, 0)], vec![w]).expect("grid cycle");
    (g, c)
}
