//! Problem instances: an undirected connected graph whose edges carry four
//! traversal weights, a set of impeded edges, and the three special vertices.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cost::{Cost, CostError};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Traversal times of one edge for both vehicles, before and after service.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeWeights {
    pub convoy_unimpeded: Cost,
    pub convoy_impeded: Cost,
    pub service_unimpeded: Cost,
    pub service_impeded: Cost,
}

impl EdgeWeights {
    pub fn new(convoy_unimpeded: Cost, convoy_impeded: Cost, service_unimpeded: Cost, service_impeded: Cost) -> Self {
        Self { convoy_unimpeded, convoy_impeded, service_unimpeded, service_impeded }
    }

    /// Weights of an unimpeded edge (impeded costs equal the unimpeded ones).
    pub fn clear(convoy: Cost, service: Cost) -> Self {
        Self::new(convoy, convoy, service, service)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub weights: EdgeWeights,
    /// Membership in the impeded set `K`.
    pub impeded: bool,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }

    fn key(&self) -> (VertexId, VertexId) {
        (self.a.min(self.b), self.a.max(self.b))
    }
}

/// Row/column layout of grid instances. Vertex `(col, row)` has id `col * rows + row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
}

impl GridShape {
    pub fn vertex(&self, col: usize, row: usize) -> VertexId {
        debug_assert!(col < self.cols && row < self.rows);
        col * self.rows + row
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v / self.rows, v % self.rows)
    }

    pub fn vertex_count(&self) -> usize {
        self.rows * self.cols
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance has no vertices")]
    Empty,
    #[error("edge {edge}: vertex {vertex} out of range (vertex_count = {count})")]
    EdgeVertexOutOfRange { edge: EdgeId, vertex: VertexId, count: usize },
    #[error("{role} vertex {vertex} out of range (vertex_count = {count})")]
    EndpointOutOfRange { role: &'static str, vertex: VertexId, count: usize },
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} duplicates edge {first} between vertices {a} and {b}")]
    DuplicateEdge { edge: EdgeId, first: EdgeId, a: VertexId, b: VertexId },
    #[error("edge {edge}: weight ordering violated: {rule}")]
    WeightOrder { edge: EdgeId, rule: &'static str },
    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: VertexId },
    #[error("grid shape {rows}x{cols} does not match vertex_count {count}")]
    GridMismatch { rows: usize, cols: usize, count: usize },
    #[error("malformed instance document: {0}")]
    Malformed(serde_json::Error),
    #[error("instance document violates the schema: {0}")]
    Schema(serde_json::Error),
    #[error("edge {edge}: invalid weight {field}: {source}")]
    InvalidCost { edge: usize, field: &'static str, source: CostError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Unvalidated instance data, as read from a document or assembled by a generator.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceParts {
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
    pub convoy_start: VertexId,
    pub service_start: VertexId,
    pub destination: VertexId,
    pub grid: Option<GridShape>,
    pub meta: BTreeMap<String, Value>,
}

/// Checks every structural and weight invariant, returning the first violation.
pub fn validate_instance(parts: &InstanceParts) -> Result<(), InstanceError> {
    let n = parts.vertex_count;
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    for (role, v) in [
        ("convoy start", parts.convoy_start),
        ("service start", parts.service_start),
        ("destination", parts.destination),
    ] {
        if v >= n {
            return Err(InstanceError::EndpointOutOfRange { role, vertex: v, count: n });
        }
    }
    if let Some(g) = parts.grid {
        if g.vertex_count() != n {
            return Err(InstanceError::GridMismatch { rows: g.rows, cols: g.cols, count: n });
        }
    }

    let mut seen: HashMap<(VertexId, VertexId), EdgeId> = HashMap::with_capacity(parts.edges.len());
    for (idx, edge) in parts.edges.iter().enumerate() {
        let id = EdgeId(idx);
        for v in [edge.a, edge.b] {
            if v >= n {
                return Err(InstanceError::EdgeVertexOutOfRange { edge: id, vertex: v, count: n });
            }
        }
        if edge.a == edge.b {
            return Err(InstanceError::SelfLoop { edge: id, vertex: edge.a });
        }
        if let Some(&first) = seen.get(&edge.key()) {
            return Err(InstanceError::DuplicateEdge { edge: id, first, a: edge.a, b: edge.b });
        }
        seen.insert(edge.key(), id);
        check_weights(id, edge)?;
    }

    let mut adjacency = vec![Vec::new(); n];
    for edge in &parts.edges {
        adjacency[edge.a].push(edge.b);
        adjacency[edge.b].push(edge.a);
    }
    let mut reached = vec![false; n];
    let mut queue = VecDeque::from([0]);
    reached[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !reached[w] {
                reached[w] = true;
                queue.push_back(w);
            }
        }
    }
    if let Some(vertex) = reached.iter().position(|r| !r) {
        return Err(InstanceError::Disconnected { vertex });
    }
    Ok(())
}

fn check_weights(edge: EdgeId, e: &Edge) -> Result<(), InstanceError> {
    let w = &e.weights;
    let fail = |rule| Err(InstanceError::WeightOrder { edge, rule });
    if e.impeded {
        if w.convoy_impeded <= w.convoy_unimpeded {
            return fail("impeded edge needs convoy impeded > convoy unimpeded");
        }
        if w.service_impeded <= w.service_unimpeded {
            return fail("impeded edge needs service impeded > service unimpeded");
        }
    } else {
        if w.convoy_impeded != w.convoy_unimpeded {
            return fail("unimpeded edge needs convoy impeded = convoy unimpeded");
        }
        if w.service_impeded != w.service_unimpeded {
            return fail("unimpeded edge needs service impeded = service unimpeded");
        }
    }
    if w.service_unimpeded >= w.convoy_unimpeded {
        return fail("service vehicle must be faster than the convoy (unimpeded)");
    }
    if w.service_impeded >= w.convoy_impeded {
        return fail("service vehicle must be faster than the convoy (impeded)");
    }
    Ok(())
}

/// A validated, immutable instance.
#[derive(Clone, Debug)]
pub struct Instance {
    parts: InstanceParts,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    by_endpoints: HashMap<(VertexId, VertexId), EdgeId>,
    impeded: Vec<EdgeId>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl TryFrom<InstanceParts> for Instance {
    type Error = InstanceError;

    fn try_from(parts: InstanceParts) -> Result<Self, InstanceError> {
        validate_instance(&parts)?;
        let mut adjacency = vec![Vec::new(); parts.vertex_count];
        let mut by_endpoints = HashMap::with_capacity(parts.edges.len());
        for (idx, e) in parts.edges.iter().enumerate() {
            adjacency[e.a].push((e.b, EdgeId(idx)));
            adjacency[e.b].push((e.a, EdgeId(idx)));
            by_endpoints.insert(e.key(), EdgeId(idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let impeded = (0..parts.edges.len()).filter(|&i| parts.edges[i].impeded).map(EdgeId).collect();
        Ok(Instance { parts, adjacency, by_endpoints, impeded })
    }
}

impl Instance {
    pub fn new(
        vertex_count: usize,
        edges: Vec<Edge>,
        convoy_start: VertexId,
        service_start: VertexId,
        destination: VertexId,
    ) -> Result<Self, InstanceError> {
        InstanceParts {
            vertex_count,
            edges,
            convoy_start,
            service_start,
            destination,
            grid: None,
            meta: BTreeMap::new(),
        }
        .try_into()
    }

    pub fn with_grid(self, grid: GridShape) -> Result<Self, InstanceError> {
        let mut parts = self.parts;
        parts.grid = Some(grid);
        parts.try_into()
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: Value) -> Self {
        self.parts.meta.insert(key.into(), value);
        self
    }

    /// Same graph and weights with a different service-vehicle start.
    pub fn with_service_start(&self, q: VertexId) -> Result<Self, InstanceError> {
        let mut parts = self.parts.clone();
        parts.service_start = q;
        parts.try_into()
    }

    pub fn parts(&self) -> &InstanceParts {
        &self.parts
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.parts.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.parts.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.parts.edges[id.0]
    }

    pub fn convoy_start(&self) -> VertexId {
        self.parts.convoy_start
    }

    pub fn service_start(&self) -> VertexId {
        self.parts.service_start
    }

    pub fn destination(&self) -> VertexId {
        self.parts.destination
    }

    pub fn grid(&self) -> Option<GridShape> {
        self.parts.grid
    }

    pub fn meta(&self) -> &BTreeMap<String, Value> {
        &self.parts.meta
    }

    /// Neighbours of `v` with the connecting edge, sorted by neighbour id.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.by_endpoints.get(&(a.min(b), a.max(b))).copied()
    }

    /// The impeded set `K`, in edge-id order.
    pub fn impeded_edges(&self) -> &[EdgeId] {
        &self.impeded
    }

    pub fn is_impeded(&self, id: EdgeId) -> bool {
        self.parts.edges[id.0].impeded
    }

    /// Human-readable vertex name: `(col,row)` on grids, the id otherwise.
    pub fn vertex_label(&self, v: VertexId) -> String {
        match self.parts.grid {
            Some(g) => {
                let (c, r) = g.coords(v);
                format!("({c},{r})")
            }
            None => v.to_string(),
        }
    }

    /// Whether removing every impeded edge disconnects the convoy start from the destination.
    pub fn impeded_set_separates(&self) -> bool {
        let n = self.vertex_count();
        let mut reached = vec![false; n];
        let mut queue = VecDeque::from([self.convoy_start()]);
        reached[self.convoy_start()] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, e) in self.incident(v) {
                if !self.is_impeded(e) && !reached[w] {
                    reached[w] = true;
                    queue.push_back(w);
                }
            }
        }
        !reached[self.destination()]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|err| {
            if err.is_data() {
                InstanceError::Schema(err)
            } else {
                InstanceError::Malformed(err)
            }
        })?;
        doc.into_parts()?.try_into()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// On-disk JSON layout. Weights are plain numbers in whole time units.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    vertex_count: usize,
    edges: Vec<EdgeDoc>,
    p: VertexId,
    q: VertexId,
    d: VertexId,
    #[serde(default)]
    meta: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: VertexId,
    b: VertexId,
    impeded: bool,
    #[serde(rename = "Tu")]
    convoy_unimpeded: f64,
    #[serde(rename = "Ti")]
    convoy_impeded: f64,
    #[serde(rename = "tu")]
    service_unimpeded: f64,
    #[serde(rename = "ti")]
    service_impeded: f64,
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        let p = &inst.parts;
        InstanceDoc {
            rows: p.grid.map(|g| g.rows),
            cols: p.grid.map(|g| g.cols),
            vertex_count: p.vertex_count,
            edges: p
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    a: e.a,
                    b: e.b,
                    impeded: e.impeded,
                    convoy_unimpeded: e.weights.convoy_unimpeded.as_units(),
                    convoy_impeded: e.weights.convoy_impeded.as_units(),
                    service_unimpeded: e.weights.service_unimpeded.as_units(),
                    service_impeded: e.weights.service_impeded.as_units(),
                })
                .collect(),
            p: p.convoy_start,
            q: p.service_start,
            d: p.destination,
            meta: p.meta.clone(),
        }
    }
}

impl InstanceDoc {
    fn into_parts(self) -> Result<InstanceParts, InstanceError> {
        let grid = match (self.rows, self.cols) {
            (Some(rows), Some(cols)) => Some(GridShape { rows, cols }),
            (None, None) => None,
            _ => return Err(InstanceError::Schema(serde::de::Error::custom("rows and cols must be given together"))),
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (idx, e) in self.edges.into_iter().enumerate() {
            let cost = |field: &'static str, v: f64| {
                Cost::try_from_units(v).map_err(|source| InstanceError::InvalidCost { edge: idx, field, source })
            };
            edges.push(Edge {
                a: e.a,
                b: e.b,
                impeded: e.impeded,
                weights: EdgeWeights {
                    convoy_unimpeded: cost("Tu", e.convoy_unimpeded)?,
                    convoy_impeded: cost("Ti", e.convoy_impeded)?,
                    service_unimpeded: cost("tu", e.service_unimpeded)?,
                    service_impeded: cost("ti", e.service_impeded)?,
                },
            });
        }
        Ok(InstanceParts {
            vertex_count: self.vertex_count,
            edges,
            convoy_start: self.p,
            service_start: self.q,
            destination: self.d,
            grid,
            meta: self.meta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clear(a: VertexId, b: VertexId, tu: u64, su: u64) -> Edge {
        Edge { a, b, impeded: false, weights: EdgeWeights::clear(Cost::units(tu), Cost::units(su)) }
    }

    #[test]
    fn minimal_instance_is_valid() {
        let inst = Instance::new(2, vec![clear(0, 1, 10, 1)], 0, 0, 1).unwrap();
        assert_eq!(inst.incident(0), &[(1, EdgeId(0))]);
        assert_eq!(inst.edge_between(1, 0), Some(EdgeId(0)));
    }

    #[test]
    fn impeded_edge_needs_strict_increase() {
        let mut e = clear(0, 1, 10, 1);
        e.impeded = true;
        let err = Instance::new(2, vec![e], 0, 0, 1).unwrap_err();
        assert!(matches!(err, InstanceError::WeightOrder { edge: EdgeId(0), .. }), "{err}");
    }

    #[test]
    fn service_must_be_faster() {
        let err = Instance::new(2, vec![clear(0, 1, 3, 3)], 0, 0, 1).unwrap_err();
        assert!(matches!(err, InstanceError::WeightOrder { .. }));
    }

    #[test]
    fn structural_errors() {
        let err = Instance::new(3, vec![clear(0, 1, 10, 1)], 0, 0, 1).unwrap_err();
        assert!(matches!(err, InstanceError::Disconnected { vertex: 2 }));

        let err = Instance::new(2, vec![clear(0, 1, 10, 1), clear(1, 0, 5, 1)], 0, 0, 1).unwrap_err();
        assert!(matches!(err, InstanceError::DuplicateEdge { edge: EdgeId(1), first: EdgeId(0), .. }));

        let err = Instance::new(2, vec![clear(0, 2, 10, 1)], 0, 0, 1).unwrap_err();
        assert!(matches!(err, InstanceError::EdgeVertexOutOfRange { vertex: 2, .. }));

        let err = Instance::new(2, vec![clear(0, 1, 10, 1)], 0, 5, 1).unwrap_err();
        assert!(matches!(err, InstanceError::EndpointOutOfRange { role: "service start", .. }));

        let err = Instance::new(2, vec![clear(0, 0, 10, 1)], 0, 0, 1).unwrap_err();
        assert!(matches!(err, InstanceError::SelfLoop { .. }));
    }

    #[test]
    fn missing_destination_is_a_schema_error() {
        let doc = r#"{"vertex_count": 2, "edges": [{"a":0,"b":1,"impeded":false,"Tu":10,"Ti":10,"tu":1,"ti":1}], "p": 0, "q": 0}"#;
        assert!(matches!(Instance::from_json(doc), Err(InstanceError::Schema(_))));
        assert!(matches!(Instance::from_json("{ nope"), Err(InstanceError::Malformed(_))));
    }

    #[test]
    fn negative_weight_is_an_invariant_error() {
        let doc = r#"{"vertex_count": 2, "edges": [{"a":0,"b":1,"impeded":false,"Tu":-10,"Ti":10,"tu":1,"ti":1}], "p": 0, "q": 0, "d": 1}"#;
        let err = Instance::from_json(doc).unwrap_err();
        assert!(matches!(err, InstanceError::InvalidCost { field: "Tu", .. }), "{err}");
    }

    #[test]
    fn grid_coordinates() {
        let g = GridShape { rows: 5, cols: 10 };
        assert_eq!(g.vertex(2, 0), 10);
        assert_eq!(g.coords(g.vertex(8, 3)), (8, 3));
    }
}
