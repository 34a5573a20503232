//! The graph-spec text format: a TOML document with `vertices`, `edges` and
//! an optional `cycle` table.
//!
//! ```toml
//! [[vertices]]
//! id = 0
//! x = 0.0
//! y = 1.0
//!
//! [[edges]]
//! id = 0
//! tail = 0
//! head = 1
//! oriented = false
//! p = "1/2"
//!
//! [cycle]
//! vertices = [0, 1, 2, 3]          # clockwise
//! roles = ["u", "a", "w", "b"]
//! U = [0]
//! W = [2]
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::geometry::Point;
use super::{BoundaryCycle, Edge, GraphError, MixedPlanarGraph, Role, Vertex};
use crate::scalar::Prob;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: i64,
    pub x: f64,
    pub y: f64,
    /// Marks boundary vertices in exported dual graphs.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: i64,
    pub tail: i64,
    pub head: i64,
    pub oriented: bool,
    pub p: Prob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub vertices: Vec<i64>,
    pub roles: Vec<Role>,
    #[serde(rename = "U")]
    pub sources: Vec<i64>,
    #[serde(rename = "W")]
    pub targets: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDescription {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed graph spec: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot serialize graph spec: {0}")]
    Write(#[from] toml::ser::Error),
}

impl GraphDescription {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, FormatError> {
        Ok(toml::to_string(self)?)
    }

    /// Describes an existing graph (and optionally its cycle) in the text format.
    pub fn from_graph(g: &MixedPlanarGraph, cycle: Option<&BoundaryCycle>) -> Self {
        let id = |v: usize| g.vertices()[v].id;
        Self {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexRecord { id: v.id, x: v.pos.x, y: v.pos.y, boundary: false })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord { id: e.id, tail: id(e.tail), head: id(e.head), oriented: e.oriented, p: e.p.clone() })
                .collect(),
            cycle: cycle.map(|c| CycleRecord {
                vertices: c.vertices().iter().map(|&v| id(v)).collect(),
                roles: c.roles().to_vec(),
                sources: c.sources().iter().map(|&v| id(v)).collect(),
                targets: c.targets().iter().map(|&v| id(v)).collect(),
            }),
        }
    }

    /// The boundary cycle described by the `cycle` table, if present.
    pub fn build_cycle(&self, g: &MixedPlanarGraph) -> Result<Option<BoundaryCycle>, GraphError> {
        let Some(rec) = &self.cycle else {
            return Ok(None);
        };
        let lookup = |ids: &[i64]| -> Result<Vec<usize>, GraphError> {
            ids.iter()
                .map(|&i| g.index_of(i).ok_or_else(|| GraphError::InvalidCycle(format!("unknown vertex id {i}"))))
                .collect()
        };
        BoundaryCycle::new(g, lookup(&rec.vertices)?, rec.roles.clone(), lookup(&rec.sources)?, lookup(&rec.targets)?)
            .map(Some)
    }
}

/// Validates a description into a graph; see [`MixedPlanarGraph::new`].
pub fn build_graph(desc: &GraphDescription, require_planar: bool) -> Result<MixedPlanarGraph, GraphError> {
    let mut index = HashMap::with_capacity(desc.vertices.len());
    let vertices: Vec<Vertex> = desc
        .vertices
        .iter()
        .enumerate()
        .map(|(i, r)| {
            index.entry(r.id).or_insert(i);
            Vertex { id: r.id, pos: Point::new(r.x, r.y) }
        })
        .collect();
    let edges = desc
        .edges
        .iter()
        .map(|r| {
            let end = |v: i64| index.get(&v).copied().ok_or(GraphError::UnknownVertex { edge: r.id, vertex: v });
            Ok(Edge { id: r.id, tail: end(r.tail)?, head: end(r.head)?, oriented: r.oriented, p: r.p.clone() })
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    MixedPlanarGraph::new(vertices, edges, require_planar)
}
