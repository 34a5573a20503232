//! Rotation system and face structure of a straight-line drawing.

use super::geometry::{signed_area2, Point};
use super::{Dart, GraphError, MixedPlanarGraph, VertexIndex};

/// Counterclockwise cyclic order of darts leaving each vertex, by angle
/// measured from the +x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSystem {
    order: Vec<Vec<Dart>>,
    position: Vec<usize>,
    tail: Vec<VertexIndex>,
}

impl RotationSystem {
    pub fn compute(g: &MixedPlanarGraph) -> Self {
        let darts = 2 * g.segments().len();
        let mut order: Vec<Vec<(f64, Dart)>> = vec![Vec::new(); g.vertex_count()];
        let mut tail = vec![0; darts];
        for d in (0..darts).map(Dart) {
            let (t, h) = (g.dart_tail(d), g.dart_head(d));
            tail[d.0] = t;
            order[t].push((g.pos(h).angle_from(g.pos(t)), d));
        }
        let mut position = vec![0; darts];
        let order = order
            .into_iter()
            .map(|mut around| {
                around.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                for (i, &(_, d)) in around.iter().enumerate() {
                    position[d.0] = i;
                }
                around.into_iter().map(|(_, d)| d).collect()
            })
            .collect();
        Self { order, position, tail }
    }

    /// Darts leaving `v` in counterclockwise order.
    pub fn around(&self, v: VertexIndex) -> &[Dart] {
        &self.order[v]
    }

    pub fn ccw_next(&self, d: Dart) -> Dart {
        let around = &self.order[self.tail[d.0]];
        around[(self.position[d.0] + 1) % around.len()]
    }

    pub fn cw_next(&self, d: Dart) -> Dart {
        let around = &self.order[self.tail[d.0]];
        around[(self.position[d.0] + around.len() - 1) % around.len()]
    }

    /// Darts leaving the tail of `start`, clockwise, beginning just after `start`
    /// and ending with `start` itself.
    pub fn cw_from(&self, start: Dart) -> impl Iterator<Item = Dart> + '_ {
        let around = &self.order[self.tail[start.0]];
        let n = around.len();
        let p = self.position[start.0];
        (1..=n).map(move |k| around[(p + n * 2 - k) % n])
    }

    /// Counterclockwise analogue of [`RotationSystem::cw_from`].
    pub fn ccw_from(&self, start: Dart) -> impl Iterator<Item = Dart> + '_ {
        let around = &self.order[self.tail[start.0]];
        let n = around.len();
        let p = self.position[start.0];
        (1..=n).map(move |k| around[(p + k) % n])
    }
}

/// A face as the closed walk of darts that have it on their left.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub darts: Vec<Dart>,
    /// Twice the signed area enclosed by the walk; negative for the outer face.
    pub area2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Faces {
    faces: Vec<Face>,
    face_of: Vec<usize>,
    outer: usize,
}

impl Faces {
    /// Traces every face using `next(d) = cw_next(twin(d))`.
    pub fn compute(g: &MixedPlanarGraph, rotation: &RotationSystem) -> Result<Self, GraphError> {
        let darts = 2 * g.segments().len();
        let mut face_of = vec![usize::MAX; darts];
        let mut faces = Vec::new();
        for start in (0..darts).map(Dart) {
            if face_of[start.0] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                if face_of[d.0] != usize::MAX {
                    return Err(GraphError::FaceTraversal(format!("dart {} reached twice", d.0)));
                }
                face_of[d.0] = id;
                walk.push(d);
                d = rotation.cw_next(d.twin());
                if d == start {
                    break;
                }
                if walk.len() > darts {
                    return Err(GraphError::FaceTraversal("walk does not close".into()));
                }
            }
            let corners: Vec<Point> = walk.iter().map(|&d| g.pos(g.dart_tail(d))).collect();
            faces.push(Face { darts: walk, area2: signed_area2(&corners) });
        }
        if faces.is_empty() {
            // A single vertex: the plane is one face.
            faces.push(Face { darts: Vec::new(), area2: 0.0 });
        }
        let outer = faces
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.area2.total_cmp(&b.1.area2))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Ok(Self { faces, face_of, outer })
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn get(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter()
    }

    /// The face on the left of `d`.
    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d.0]
    }

    pub fn outer(&self) -> usize {
        self.outer
    }

    pub fn bounded(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&f| f != self.outer)
    }
}

/// Rotation system plus faces, available on graphs built with planarity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub rotation: RotationSystem,
    pub faces: Faces,
}

impl Embedding {
    pub(super) fn compute(g: &MixedPlanarGraph) -> Result<Self, GraphError> {
        let rotation = RotationSystem::compute(g);
        let faces = Faces::compute(g, &rotation)?;
        let (v, e, f) = (g.vertex_count(), g.segments().len(), faces.len());
        if v + f != e + 2 {
            return Err(GraphError::Euler { vertices: v, segments: e, faces: f });
        }
        Ok(Self { rotation, faces })
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn degree_one_vertex_has_singleton_order() {
        let g = MixedPlanarGraph::new(vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0)], vec![e(0, 0, 1, true, "1")], true).unwrap();
        let rot = g.rotation().unwrap();
        assert_eq!(rot.around(0), &[Dart(0)]);
        assert_eq!(rot.ccw_next(Dart(0)), Dart(0));
        assert_eq!(g.faces().unwrap().len(), 1);
    }

    #[test]
    fn square_corner_order_by_angle() {
        let g = square();
        let rot = g.rotation().unwrap();
        // u(0,1): a at 0°, b at 270°.
        let heads: Vec<_> = rot.around(0).iter().map(|&d| g.dart_head(d)).collect();
        assert_eq!(heads, vec![1, 3]);
    }

    #[test]
    fn grid_vertex_orders_east_north_west_south() {
        let g = MixedPlanarGraph::new(
            vec![v(0, 0.0, 0.0), v(1, 1.0, 0.0), v(2, 0.0, 1.0), v(3, -1.0, 0.0), v(4, 0.0, -1.0)],
            vec![e(0, 0, 3, false, "1"), e(1, 0, 4, false, "1"), e(2, 0, 1, false, "1"), e(3, 0, 2, false, "1")],
            true,
        )
        .unwrap();
        let heads: Vec<_> = g.rotation().unwrap().around(0).iter().map(|&d| g.dart_head(d)).collect();
        assert_eq!(heads, vec![1, 2, 3, 4]);
        // A star has one face.
        assert_eq!(g.faces().unwrap().len(), 1);
    }

    #[test]
    fn square_has_one_bounded_and_one_outer_face() {
        let g = square();
        let faces = g.faces().unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.get(faces.outer()).area2 < 0.0);
        let inner = faces.bounded().next().unwrap();
        assert_eq!(faces.get(inner).area2, 2.0);
    }

    #[test]
    fn theta_graph_has_three_faces() {
        // Two poles joined by three paths.
        let g = MixedPlanarGraph::new(
            vec![v(0, 0.0, 0.0), v(1, 2.0, 0.0), v(2, 1.0, 1.0), v(3, 1.0, 0.0), v(4, 1.0, -1.0)],
            vec![
                e(0, 0, 2, false, "1"),
                e(1, 2, 1, false, "1"),
                e(2, 0, 3, false, "1"),
                e(3, 3, 1, false, "1"),
                e(4, 0, 4, false, "1"),
                e(5, 4, 1, false, "1"),
            ],
            true,
        )
        .unwrap();
        let faces = g.faces().unwrap();
        assert_eq!(faces.len(), 3);
        assert_eq!(faces.bounded().count(), 2);
    }

    #[test]
    fn rotation_matches_recomputed_angles() {
        let g = square();
        let rot = g.rotation().unwrap();
        for vtx in 0..g.vertex_count() {
            let angles: Vec<f64> = rot.around(vtx).iter().map(|&d| g.pos(g.dart_head(d)).angle_from(g.pos(vtx))).collect();
            assert!(angles.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn cw_and_ccw_sweeps_visit_every_dart_once() {
        let g = square();
        let rot = g.rotation().unwrap();
        let start = rot.around(0)[0];
        let cw: Vec<_> = rot.cw_from(start).collect();
        let ccw: Vec<_> = rot.ccw_from(start).collect();
        assert_eq!(cw.last(), Some(&start));
        assert_eq!(ccw.last(), Some(&start));
        assert_eq!(cw.len(), 2);
        assert_eq!(cw[0], rot.cw_next(start));
        assert_eq!(ccw[0], rot.ccw_next(start));
    }
}
