//! Static single-source shortest paths for the convoy alone.
//!
//! Used for the heuristic (every edge at its unimpeded convoy cost) and for
//! the upper bound (the convoy repairing whatever it crosses).

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Index;

use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{Instance, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightSelector {
    /// `T^u` on every edge: the all-unimpeded relaxation.
    ConvoyUnimpededEverywhere,
    /// `T^u` on unimpeded edges and `T^i` on impeded ones: the convoy travelling alone.
    ConvoySolo,
}

impl WeightSelector {
    fn weight(self, inst: &Instance, e: crate::instance::EdgeId) -> Cost {
        let edge = inst.edge(e);
        match self {
            WeightSelector::ConvoyUnimpededEverywhere => edge.weights.convoy_unimpeded,
            WeightSelector::ConvoySolo if edge.impeded => edge.weights.convoy_impeded,
            WeightSelector::ConvoySolo => edge.weights.convoy_unimpeded,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("vertex {target} is unreachable from {from}")]
    Unreachable { from: VertexId, target: VertexId },
    #[error("accumulated path cost overflows")]
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPath {
    pub cost: Cost,
    pub vertices: Vec<VertexId>,
}

/// Least cost from one source to every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCostMap {
    source: VertexId,
    costs: Vec<Cost>,
}

impl VertexCostMap {
    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn as_slice(&self) -> &[Cost] {
        &self.costs
    }
}

impl Index<VertexId> for VertexCostMap {
    type Output = Cost;

    fn index(&self, v: VertexId) -> &Cost {
        &self.costs[v]
    }
}

struct Tree {
    dist: Vec<Option<Cost>>,
    pred: Vec<Option<VertexId>>,
}

// Heap order is (cost, vertex id), so equal-cost vertices settle lowest id
// first; among equal-cost predecessors the lowest id wins.
fn dijkstra(inst: &Instance, source: VertexId, selector: WeightSelector) -> Result<Tree, PathError> {
    let n = inst.vertex_count();
    let mut dist: Vec<Option<Cost>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Cost::ZERO);
    heap.push(Reverse((Cost::ZERO, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        for &(w, e) in inst.incident(v) {
            if settled[w] {
                continue;
            }
            let nd = d.checked_add(selector.weight(inst, e)).ok_or(PathError::Overflow)?;
            let better = match dist[w] {
                None => true,
                Some(old) => nd < old || (nd == old && pred[w].is_some_and(|p| v < p)),
            };
            if better {
                dist[w] = Some(nd);
                pred[w] = Some(v);
                heap.push(Reverse((nd, w)));
            }
        }
    }
    Ok(Tree { dist, pred })
}

pub fn solo_shortest_path(
    inst: &Instance,
    source: VertexId,
    target: VertexId,
    selector: WeightSelector,
) -> Result<ShortestPath, PathError> {
    let tree = dijkstra(inst, source, selector)?;
    let cost = tree.dist[target].ok_or(PathError::Unreachable { from: source, target })?;
    let mut vertices = vec![target];
    let mut v = target;
    while let Some(p) = tree.pred[v] {
        vertices.push(p);
        v = p;
    }
    vertices.reverse();
    Ok(ShortestPath { cost, vertices })
}

pub fn all_targets_shortest(
    inst: &Instance,
    source: VertexId,
    selector: WeightSelector,
) -> Result<VertexCostMap, PathError> {
    let tree = dijkstra(inst, source, selector)?;
    let costs = tree
        .dist
        .iter()
        .enumerate()
        .map(|(target, d)| d.ok_or(PathError::Unreachable { from: source, target }))
        .collect::<Result<_, _>>()?;
    Ok(VertexCostMap { source, costs })
}
