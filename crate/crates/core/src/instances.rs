//! Seeded grid instance generators.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`; the impeded set, the weights and the service start
//! each draw from their own stream of that generator so changing one mode
//! does not perturb the others.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{Edge, EdgeId, EdgeWeights, GridShape, Instance, InstanceError, InstanceParts, VertexId};

const STREAM_IMPEDED: u64 = 1;
const STREAM_WEIGHTS: u64 = 2;
const STREAM_SERVICE_START: u64 = 3;

/// Per-row probability that a cut's boundary shifts one column left (and,
/// separately, right) relative to the row below.
pub const CUT_SHIFT_PROBABILITY: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ImpededMode {
    /// `round(f * |E|)` edges chosen uniformly without replacement.
    Fraction(f64),
    /// Union of this many random p-d cuts.
    Cuts(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostMode {
    /// `T^u` in 10..=15, `T^i` in 40..=50, `τ^u` = 1, `τ^i` in 2..=6.
    Ranged,
    /// 10 / 40 / 1 / 6.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ServiceStart {
    Random,
    Vertex(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    pub impeded: ImpededMode,
    pub cost: CostMode,
    pub service_start: ServiceStart,
}

impl GeneratorConfig {
    pub fn new(rows: usize, cols: usize, seed: u64, impeded: ImpededMode, cost: CostMode) -> Self {
        GeneratorConfig { rows, cols, seed, impeded, cost, service_start: ServiceStart::Random }
    }

    pub fn shape(&self) -> GridShape {
        GridShape { rows: self.rows, cols: self.cols }
    }
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("cannot place {cuts} distinct cuts on a grid with {cols} columns")]
    TooManyCuts { cuts: usize, cols: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Grid edges in id order: column by column, and within a column row by
/// row, the edge to the right followed by the edge upwards.
pub fn grid_edges(shape: GridShape) -> Vec<(VertexId, VertexId)> {
    let mut edges = Vec::with_capacity(2 * shape.vertex_count());
    for col in 0..shape.cols {
        for row in 0..shape.rows {
            let v = shape.vertex(col, row);
            if col + 1 < shape.cols {
                edges.push((v, shape.vertex(col + 1, row)));
            }
            if row + 1 < shape.rows {
                edges.push((v, shape.vertex(col, row + 1)));
            }
        }
    }
    edges
}

/// `round(f * m)`, halves rounding up.
pub fn impeded_count(fraction: f64, edge_count: usize) -> usize {
    ((fraction * edge_count as f64) + 0.5 + 1e-9).floor() as usize
}

fn fraction_impeded(edge_count: usize, fraction: f64, rng: &mut ChaCha8Rng) -> BTreeSet<EdgeId> {
    let k = impeded_count(fraction, edge_count).min(edge_count);
    sample(rng, edge_count, k).into_iter().map(EdgeId).collect()
}

/// Union of `cuts` random p-d cuts on a grid with `p` in column 0 and `d`
/// in the last column.
///
/// Each cut picks a distinct column boundary `k` (between columns `k` and
/// `k + 1`). Going up the rows, the boundary position performs a lazy random
/// walk confined to `k - 1 ..= k + 1`; vertices left of it form one side of
/// the cut, and the cut is every edge joining the two sides.
pub fn generate_cuts(shape: GridShape, cuts: usize, rng: &mut impl Rng) -> Result<BTreeSet<EdgeId>, GeneratorError> {
    let boundaries = shape.cols.saturating_sub(1);
    if cuts == 0 || cuts > boundaries {
        return Err(GeneratorError::TooManyCuts { cuts, cols: shape.cols });
    }
    let edges = grid_edges(shape);
    let mut chosen: Vec<usize> = sample(rng, boundaries, cuts).into_vec();
    chosen.sort_unstable();

    let mut impeded = BTreeSet::new();
    for k in chosen {
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(boundaries - 1);
        let mut split = Vec::with_capacity(shape.rows);
        let mut s = k;
        for row in 0..shape.rows {
            if row > 0 {
                let r: f64 = rng.gen();
                if r < CUT_SHIFT_PROBABILITY && s > lo {
                    s -= 1;
                } else if r >= 1.0 - CUT_SHIFT_PROBABILITY && s < hi {
                    s += 1;
                }
            }
            split.push(s);
        }
        let left = |v: VertexId| {
            let (col, row) = shape.coords(v);
            col <= split[row]
        };
        for (idx, &(a, b)) in edges.iter().enumerate() {
            if left(a) != left(b) {
                impeded.insert(EdgeId(idx));
            }
        }
    }
    Ok(impeded)
}

/// Weights for every edge in id order.
pub fn sample_weights(
    edge_count: usize,
    impeded: &BTreeSet<EdgeId>,
    mode: CostMode,
    rng: &mut impl Rng,
) -> Vec<EdgeWeights> {
    let u = Cost::units;
    (0..edge_count)
        .map(|i| {
            let is_impeded = impeded.contains(&EdgeId(i));
            match mode {
                CostMode::Fixed if is_impeded => EdgeWeights::new(u(10), u(40), u(1), u(6)),
                CostMode::Fixed => EdgeWeights::clear(u(10), u(1)),
                CostMode::Ranged => {
                    let convoy = u(rng.gen_range(10..=15));
                    if is_impeded {
                        let convoy_impeded = u(rng.gen_range(40..=50));
                        let service_impeded = u(rng.gen_range(2..=6));
                        EdgeWeights::new(convoy, convoy_impeded, u(1), service_impeded)
                    } else {
                        EdgeWeights::clear(convoy, u(1))
                    }
                }
            }
        })
        .collect()
}

/// Assembles a grid instance with `p = (0, 0)` and `d = (cols - 1, rows - 1)`.
pub fn grid_instance(
    shape: GridShape,
    impeded: &BTreeSet<EdgeId>,
    weights: &[EdgeWeights],
    service_start: VertexId,
) -> Result<Instance, InstanceError> {
    let edges = grid_edges(shape)
        .into_iter()
        .zip(weights)
        .enumerate()
        .map(|(i, ((a, b), &weights))| Edge { a, b, weights, impeded: impeded.contains(&EdgeId(i)) })
        .collect();
    InstanceParts {
        vertex_count: shape.vertex_count(),
        edges,
        convoy_start: 0,
        service_start,
        destination: shape.vertex(shape.cols - 1, shape.rows - 1),
        grid: Some(shape),
        meta: Default::default(),
    }
    .try_into()
}

pub fn generate_grid(config: &GeneratorConfig) -> Result<Instance, GeneratorError> {
    let shape = config.shape();
    if config.rows == 0 || config.cols == 0 || shape.vertex_count() < 2 {
        return Err(GeneratorError::InvalidConfig(format!("{}x{} grid is too small", config.rows, config.cols)));
    }
    let edge_count = grid_edges(shape).len();
    let mut rng = stream(config.seed, STREAM_IMPEDED);
    let impeded = match config.impeded {
        ImpededMode::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
            return Err(GeneratorError::InvalidConfig(format!("impeded fraction {f} outside (0, 1]")))
        }
        ImpededMode::Fraction(f) => fraction_impeded(edge_count, f, &mut rng),
        ImpededMode::Cuts(c) => generate_cuts(shape, c, &mut rng)?,
    };
    let weights = sample_weights(edge_count, &impeded, config.cost, &mut stream(config.seed, STREAM_WEIGHTS));
    let q = match config.service_start {
        ServiceStart::Random => stream(config.seed, STREAM_SERVICE_START).gen_range(0..shape.vertex_count()),
        ServiceStart::Vertex(v) if v < shape.vertex_count() => v,
        ServiceStart::Vertex(v) => {
            return Err(GeneratorError::InvalidConfig(format!("service start {v} outside the grid")))
        }
    };
    let impeded_meta = match config.impeded {
        ImpededMode::Fraction(f) => json!({ "fraction": f }),
        ImpededMode::Cuts(c) => json!({ "cuts": c }),
    };
    let cost_meta = match config.cost {
        CostMode::Ranged => "ranged",
        CostMode::Fixed => "fixed",
    };
    Ok(grid_instance(shape, &impeded, &weights, q)?
        .with_meta("seed", json!(config.seed))
        .with_meta("impeded", impeded_meta)
        .with_meta("cost_mode", json!(cost_meta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts() {
        assert_eq!(grid_edges(GridShape { rows: 2, cols: 2 }).len(), 4);
        assert_eq!(grid_edges(GridShape { rows: 5, cols: 10 }).len(), 85);
    }

    #[test]
    fn rounding() {
        assert_eq!(impeded_count(0.1, 24), 2);
        assert_eq!(impeded_count(0.25, 10), 3);
        assert_eq!(impeded_count(0.1, 17), 2);
        assert_eq!(impeded_count(0.3, 17), 5);
    }

    #[test]
    fn fixed_weights() {
        let cfg = GeneratorConfig::new(3, 4, 7, ImpededMode::Fraction(0.3), CostMode::Fixed);
        let inst = generate_grid(&cfg).unwrap();
        for e in inst.edges() {
            let w = e.weights;
            let expect = if e.impeded { (10, 40, 1, 6) } else { (10, 10, 1, 1) };
            let got = (w.convoy_unimpeded, w.convoy_impeded, w.service_unimpeded, w.service_impeded);
            assert_eq!(
                got,
                (Cost::units(expect.0), Cost::units(expect.1), Cost::units(expect.2), Cost::units(expect.3))
            );
        }
    }
}
