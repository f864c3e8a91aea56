//! Brute-force reference solver for small instances.
//!
//! Every service-vehicle walk from `q` of at most `B` edges that ends by
//! servicing an impeded edge is enumerated (plus the empty plan). For each
//! walk the convoy's best response is an earliest-arrival search in which an
//! impeded edge serviced at `s` costs `min(T^i, T^u + max(0, s - t))` when
//! entered at `t`. The answer is the least convoy arrival plus walk duration.
//!
//! Nothing here shares code with the label engine.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{EdgeId, Instance, VertexId};

pub const DEFAULT_PLAN_CAP: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("more than {cap} service plans evaluated")]
    PlanCapExceeded { cap: u64 },
    #[error("destination unreachable")]
    Unreachable,
    #[error("time arithmetic overflows")]
    Overflow,
}

/// A service-vehicle walk with its timing. The vehicle stops at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServicePlan {
    pub walk: Vec<EdgeId>,
    /// `q` followed by each vertex reached.
    pub vertices: Vec<VertexId>,
    /// Arrival time at each entry of `vertices`.
    pub arrivals: Vec<Cost>,
    /// Impeded edges serviced by the walk and when.
    pub services: Vec<(EdgeId, Cost)>,
}

impl ServicePlan {
    pub fn empty(q: VertexId) -> Self {
        ServicePlan { walk: Vec::new(), vertices: vec![q], arrivals: vec![Cost::ZERO], services: Vec::new() }
    }

    pub fn duration(&self) -> Cost {
        *self.arrivals.last().expect("plans contain the start vertex")
    }

    pub fn terminal(&self) -> VertexId {
        *self.vertices.last().expect("plans contain the start vertex")
    }

    pub fn service_time(&self, e: EdgeId) -> Option<Cost> {
        self.services.iter().find(|&&(id, _)| id == e).map(|&(_, t)| t)
    }
}

/// Depth-first walk generator. A walk may not revisit a vertex between two
/// consecutive services, since the serviced set is unchanged in between.
struct Walker<'a> {
    inst: &'a Instance,
    bound: usize,
    plan: ServicePlan,
    serviced: Vec<bool>,
    cursor: Vec<usize>,
    serviced_here: Vec<bool>,
    segment_starts: Vec<usize>,
    started: bool,
}

impl<'a> Walker<'a> {
    fn new(inst: &'a Instance, bound: usize) -> Self {
        Walker {
            inst,
            bound,
            plan: ServicePlan::empty(inst.service_start()),
            serviced: vec![false; inst.edge_count()],
            cursor: vec![0],
            serviced_here: Vec::new(),
            segment_starts: vec![0],
            started: false,
        }
    }

    /// Next complete plan. `prune` sees each partial walk right after a move
    /// and returns true to skip everything below it.
    fn advance(&mut self, mut prune: impl FnMut(&ServicePlan) -> bool) -> Result<Option<ServicePlan>, OracleError> {
        if !self.started {
            self.started = true;
            return Ok(Some(self.plan.clone()));
        }
        loop {
            let depth = self.plan.walk.len();
            let v = self.plan.vertices[depth];
            let incident = self.inst.incident(v);
            let idx = self.cursor[depth];
            if depth < self.bound && idx < incident.len() {
                self.cursor[depth] += 1;
                let (w, e) = incident[idx];
                let seg = *self.segment_starts.last().expect("root segment");
                if self.plan.vertices[seg..].contains(&w) {
                    continue;
                }
                let edge = self.inst.edge(e);
                let fresh = edge.impeded && !self.serviced[e.0];
                let dt = if fresh { edge.weights.service_impeded } else { edge.weights.service_unimpeded };
                let t = self.plan.duration().checked_add(dt).ok_or(OracleError::Overflow)?;
                self.plan.walk.push(e);
                self.plan.vertices.push(w);
                self.plan.arrivals.push(t);
                self.cursor.push(0);
                self.serviced_here.push(fresh);
                if fresh {
                    self.serviced[e.0] = true;
                    self.plan.services.push((e, t));
                    self.segment_starts.push(depth + 1);
                }
                if prune(&self.plan) {
                    self.retreat();
                    continue;
                }
                if fresh {
                    return Ok(Some(self.plan.clone()));
                }
            } else if depth == 0 {
                return Ok(None);
            } else {
                self.retreat();
            }
        }
    }

    fn retreat(&mut self) {
        let e = self.plan.walk.pop().expect("retreat below the root");
        self.plan.vertices.pop();
        self.plan.arrivals.pop();
        self.cursor.pop();
        if self.serviced_here.pop().expect("one flag per move") {
            self.serviced[e.0] = false;
            self.plan.services.pop();
            self.segment_starts.pop();
        }
    }
}

/// Iterator over the empty plan and every admissible walk of at most `bound` edges.
pub struct ServicePlans<'a> {
    walker: Walker<'a>,
}

impl Iterator for ServicePlans<'_> {
    type Item = ServicePlan;

    fn next(&mut self) -> Option<ServicePlan> {
        self.walker.advance(|_| false).expect("plan timing overflows")
    }
}

pub fn enumerate_service_plans(inst: &Instance, bound: usize) -> ServicePlans<'_> {
    ServicePlans { walker: Walker::new(inst, bound) }
}

/// `|V| + 2|K|`.
pub fn default_bound(inst: &Instance) -> usize {
    inst.vertex_count() + 2 * inst.impeded_edges().len()
}

/// Earliest convoy arrival at `d` given per-edge service times (`None` =
/// never serviced by the service vehicle).
fn convoy_arrival(inst: &Instance, service_times: &[Option<Cost>]) -> Result<Cost, OracleError> {
    let n = inst.vertex_count();
    let mut best: Vec<Option<Cost>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[inst.convoy_start()] = Some(Cost::ZERO);
    heap.push(Reverse((Cost::ZERO, inst.convoy_start())));
    while let Some(Reverse((t, v))) = heap.pop() {
        if best[v].is_some_and(|b| b < t) {
            continue;
        }
        if v == inst.destination() {
            return Ok(t);
        }
        for &(w, e) in inst.incident(v) {
            let edge = inst.edge(e);
            let unimpeded = edge.weights.convoy_unimpeded;
            let arrive = if !edge.impeded {
                t.checked_add(unimpeded)
            } else {
                let solo = t.checked_add(edge.weights.convoy_impeded);
                match service_times[e.0] {
                    Some(s) => solo.zip(t.max(s).checked_add(unimpeded)).map(|(a, b)| a.min(b)),
                    None => solo,
                }
            }
            .ok_or(OracleError::Overflow)?;
            if best[w].is_none_or(|b| arrive < b) {
                best[w] = Some(arrive);
                heap.push(Reverse((arrive, w)));
            }
        }
    }
    Err(OracleError::Unreachable)
}

fn schedule(inst: &Instance, services: &[(EdgeId, Cost)], rest: Option<Cost>) -> Vec<Option<Cost>> {
    let mut times = vec![None; inst.edge_count()];
    if let Some(t) = rest {
        for &e in inst.impeded_edges() {
            times[e.0] = Some(t);
        }
    }
    for &(e, t) in services {
        times[e.0] = Some(t);
    }
    times
}

/// Least total cost when the service vehicle follows `plan`.
pub fn convoy_best_response(inst: &Instance, plan: &ServicePlan) -> Result<Cost, OracleError> {
    let arrival = convoy_arrival(inst, &schedule(inst, &plan.services, None))?;
    arrival.checked_add(plan.duration()).ok_or(OracleError::Overflow)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub bound: usize,
    pub plan_cap: u64,
}

impl OracleConfig {
    pub fn for_instance(inst: &Instance) -> Self {
        OracleConfig { bound: default_bound(inst), plan_cap: DEFAULT_PLAN_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub cost: Cost,
    pub plan: ServicePlan,
    pub plans_evaluated: u64,
}

/// Minimum over all plans of [`convoy_best_response`], with branch-and-bound:
/// a partial walk at time `t` is dropped when even servicing every remaining
/// impeded edge at `t` could not beat the incumbent.
pub fn oracle_solve(inst: &Instance, config: OracleConfig) -> Result<OracleOutcome, OracleError> {
    let mut walker = Walker::new(inst, config.bound);
    let empty = walker.advance(|_| false)?.expect("the empty plan comes first");
    let mut best = OracleOutcome { cost: convoy_best_response(inst, &empty)?, plan: empty, plans_evaluated: 1 };
    loop {
        let incumbent = best.cost;
        let mut failure = None;
        let next = walker.advance(|partial| {
            let floor = convoy_arrival(inst, &schedule(inst, &partial.services, Some(partial.duration())))
                .and_then(|a| a.checked_add(partial.duration()).ok_or(OracleError::Overflow));
            match floor {
                Ok(f) => f >= incumbent,
                Err(err) => {
                    failure = Some(err);
                    true
                }
            }
        })?;
        if let Some(err) = failure {
            return Err(err);
        }
        let Some(plan) = next else { break };
        best.plans_evaluated += 1;
        if best.plans_evaluated > config.plan_cap {
            return Err(OracleError::PlanCapExceeded { cap: config.plan_cap });
        }
        let cost = convoy_best_response(inst, &plan)?;
        if cost < best.cost {
            best.cost = cost;
            best.plan = plan;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Edge, EdgeWeights};

    fn u(x: u64) -> Cost {
        Cost::units(x)
    }

    fn triangle() -> Instance {
        let imp = EdgeWeights::new(u(10), u(40), u(1), u(6));
        let clear = EdgeWeights::clear(u(10), u(1));
        let edges = vec![
            Edge { a: 0, b: 1, weights: imp, impeded: true },
            Edge { a: 1, b: 2, weights: imp, impeded: true },
            Edge { a: 0, b: 2, weights: clear, impeded: false },
        ];
        Instance::new(3, edges, 0, 0, 2).unwrap()
    }

    #[test]
    fn zero_bound_gives_only_the_empty_plan() {
        let plans: Vec<_> = enumerate_service_plans(&triangle(), 0).collect();
        assert_eq!(plans, vec![ServicePlan::empty(0)]);
    }

    #[test]
    fn triangle_hand_count() {
        let inst = triangle();
        let walks: Vec<Vec<usize>> =
            enumerate_service_plans(&inst, 3).map(|p| p.walk.iter().map(|e| e.0).collect()).collect();
        assert_eq!(walks, vec![vec![], vec![0], vec![0, 1], vec![2, 1], vec![2, 1, 0]]);
    }

    #[test]
    fn single_edge_plan_timing() {
        let imp = EdgeWeights::new(u(10), u(40), u(1), u(6));
        let inst = Instance::new(2, vec![Edge { a: 0, b: 1, weights: imp, impeded: true }], 0, 0, 1).unwrap();
        let plans: Vec<_> = enumerate_service_plans(&inst, 1).collect();
        assert_eq!(plans.len(), 2);
        assert_eq!(plans[1].services, vec![(EdgeId(0), u(6))]);
        // convoy waits until 6 then pays 10
        assert_eq!(convoy_best_response(&inst, &plans[1]).unwrap(), u(22));
        assert_eq!(convoy_best_response(&inst, &plans[0]).unwrap(), u(40));
    }
}
