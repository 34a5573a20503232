use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Dart, EdgeIndex, GraphError, MixedPlanarGraph, VertexIndex};

/// Block label of a vertex on the outer cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "u")]
    U,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "w")]
    W,
    #[serde(rename = "b")]
    B,
}

/// The outer face-bounding cycle, listed clockwise, split into the four
/// contiguous blocks `u…, a…, w…, b…`, together with the source set `U`
/// (inside the u-block) and target set `W` (inside the w-block).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCycle {
    vertices: Vec<VertexIndex>,
    roles: Vec<Role>,
    sources: Vec<VertexIndex>,
    targets: Vec<VertexIndex>,
    darts: Vec<Dart>,
    position: HashMap<VertexIndex, usize>,
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidCycle(msg.into())
}

impl BoundaryCycle {
    pub fn new(
        g: &MixedPlanarGraph,
        vertices: Vec<VertexIndex>,
        roles: Vec<Role>,
        sources: Vec<VertexIndex>,
        targets: Vec<VertexIndex>,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        if n < 3 {
            return Err(invalid("a cycle needs at least three vertices"));
        }
        if roles.len() != n {
            return Err(invalid("one role per cycle vertex is required"));
        }
        let mut position = HashMap::with_capacity(n);
        for (i, &v) in vertices.iter().enumerate() {
            if v >= g.vertex_count() {
                return Err(invalid(format!("unknown vertex index {v}")));
            }
            if position.insert(v, i).is_some() {
                return Err(invalid(format!("vertex {} repeats", g.vertices()[v].id)));
            }
        }
        let darts = (0..n)
            .map(|i| {
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                g.dart_from_to(a, b).ok_or_else(|| {
                    invalid(format!("vertices {} and {} are not adjacent", g.vertices()[a].id, g.vertices()[b].id))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        check_block_order(&roles)?;

        for (set, role, name) in [(&sources, Role::U, "U"), (&targets, Role::W, "W")] {
            if set.is_empty() {
                return Err(invalid(format!("{name} must be non-empty")));
            }
            let mut seen = HashSet::new();
            for v in set.iter() {
                match position.get(v) {
                    Some(&i) if roles[i] == role => {}
                    _ => return Err(invalid(format!("{name} must lie in its own block"))),
                }
                if !seen.insert(*v) {
                    return Err(invalid(format!("{name} repeats a vertex")));
                }
            }
        }

        let faces = g.faces()?;
        let outer: HashSet<Dart> = faces.get(faces.outer()).darts.iter().copied().collect();
        let mine: HashSet<Dart> = darts.iter().copied().collect();
        if outer != mine || faces.get(faces.outer()).darts.len() != n {
            return Err(invalid("the cycle, read clockwise, must be the boundary of the outer face"));
        }

        let mut sources = sources;
        let mut targets = targets;
        sources.sort_by_key(|v| position[v]);
        targets.sort_by_key(|v| position[v]);
        Ok(Self { vertices, roles, sources, targets, darts, position })
    }

    pub fn vertices(&self) -> &[VertexIndex] {
        &self.vertices
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn role_of(&self, v: VertexIndex) -> Option<Role> {
        self.position.get(&v).map(|&i| self.roles[i])
    }

    pub fn position(&self, v: VertexIndex) -> Option<usize> {
        self.position.get(&v).copied()
    }

    /// The set `U`.
    pub fn sources(&self) -> &[VertexIndex] {
        &self.sources
    }

    /// The set `W`.
    pub fn targets(&self) -> &[VertexIndex] {
        &self.targets
    }

    /// The single source `u`, when `|U| = 1`.
    pub fn source(&self) -> Option<VertexIndex> {
        (self.sources.len() == 1).then(|| self.sources[0])
    }

    /// The single target `w`, when `|W| = 1`.
    pub fn target(&self) -> Option<VertexIndex> {
        (self.targets.len() == 1).then(|| self.targets[0])
    }

    pub fn block(&self, role: Role) -> Vec<VertexIndex> {
        // Start just after a vertex of another role so the block reads in clockwise order.
        let n = self.len();
        let start = (0..n).find(|&i| self.roles[i] != role && self.roles[(i + 1) % n] == role);
        match start {
            Some(s) => (1..=n).map(|k| (s + k) % n).take_while(|&i| self.roles[i] == role).map(|i| self.vertices[i]).collect(),
            None if self.roles.iter().all(|&r| r == role) => self.vertices.clone(),
            None => Vec::new(),
        }
    }

    /// Darts along the cycle; dart `i` runs from vertex `i` to vertex `i + 1`.
    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn contains_segment(&self, s: usize) -> bool {
        self.darts.iter().any(|d| d.segment() == s)
    }

    /// Darts of the clockwise walk along the cycle from `x` to `y`.
    pub fn arc(&self, x: VertexIndex, y: VertexIndex) -> Option<Vec<Dart>> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        let n = self.len();
        let steps = (j + n - i) % n;
        Some((0..steps).map(|k| self.darts[(i + k) % n]).collect())
    }

    /// Edges of `g` drawn on the clockwise arc from `x` to `y` (the set `[x, y]`).
    pub fn arc_edges(&self, g: &MixedPlanarGraph, x: VertexIndex, y: VertexIndex) -> Option<Vec<EdgeIndex>> {
        let arc = self.arc(x, y)?;
        Some(arc.iter().flat_map(|d| g.segments()[d.segment()].edges.iter().copied()).collect())
    }
}

/// Roles must form the cyclic block sequence `U+ A* W+ B*`.
fn check_block_order(roles: &[Role]) -> Result<(), GraphError> {
    let n = roles.len();
    let Some(start) = (0..n).find(|&i| roles[i] == Role::U && roles[(i + n - 1) % n] != Role::U) else {
        return Err(invalid("roles must contain a u-block and other blocks"));
    };
    let mut runs: Vec<Role> = Vec::new();
    for k in 0..n {
        let r = roles[(start + k) % n];
        if runs.last() != Some(&r) {
            runs.push(r);
        }
    }
    let ok = matches!(
        runs.as_slice(),
        [Role::U, Role::A, Role::W, Role::B] | [Role::U, Role::W, Role::B] | [Role::U, Role::A, Role::W] | [Role::U, Role::W]
    );
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("roles must read u…, a…, w…, b… clockwise, found {runs:?}")))
    }
}
