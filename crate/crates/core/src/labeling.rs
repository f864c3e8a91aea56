//! Joint search states for the convoy and the service vehicle.
//!
//! A [`Label`] records where both vehicles are, their clocks, the accumulated
//! cost and which impeded edges have been serviced and when. Labels are
//! extended by one joint move at a time ([`ref_extend`]) and compared with
//! [`dominates`], which only relates labels sharing positions and flags.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{Edge, EdgeId, Instance, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("infeasible move {mv}: {reason}")]
    InfeasibleMove { mv: ExtensionMove, reason: &'static str },
    #[error("labels with the convoy at the destination are never extended")]
    AtDestination,
    #[error("labels are not comparable (positions or flags differ)")]
    NotComparable,
    #[error("fixed-point overflow while extending a label")]
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vehicle {
    Convoy,
    Service,
}

/// One vehicle's part of a joint move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Stay,
    Cross(EdgeId),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Stay => write!(f, "stay"),
            Step::Cross(e) => write!(f, "{e}"),
        }
    }
}

/// A joint move. A staying service vehicle means it has terminated; a
/// staying convoy waits at an impeded-edge endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionMove {
    pub convoy: Step,
    pub service: Step,
}

impl ExtensionMove {
    pub fn new(convoy: Step, service: Step) -> Self {
        Self { convoy, service }
    }
}

impl fmt::Display for ExtensionMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(convoy {}, service {})", self.convoy, self.service)
    }
}

/// Serviced impeded edges with their service completion times, sorted by edge id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ServiceLog {
    records: Vec<(EdgeId, Cost)>,
}

impl ServiceLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> Option<Cost> {
        self.records.binary_search_by_key(&e, |&(id, _)| id).ok().map(|i| self.records[i].1)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.get(e).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Cost)> + '_ {
        self.records.iter().copied()
    }

    /// `S(V)`: the serviced edges.
    pub fn serviced(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.records.iter().map(|&(e, _)| e)
    }

    /// `K \ S(V)`: impeded edges not yet serviced.
    pub fn remaining<'a>(&'a self, inst: &'a Instance) -> impl Iterator<Item = EdgeId> + 'a {
        inst.impeded_edges().iter().copied().filter(|&e| !self.contains(e))
    }

    /// Records a service completion, keeping the earliest time per edge.
    pub fn record(&mut self, e: EdgeId, time: Cost) {
        match self.records.binary_search_by_key(&e, |&(id, _)| id) {
            Ok(i) => self.records[i].1 = self.records[i].1.min(time),
            Err(i) => self.records.insert(i, (e, time)),
        }
    }

    /// True when every edge in `other` is serviced here no later than there.
    pub fn covers(&self, other: &ServiceLog) -> bool {
        self.covers_with(other, Some(Cost::ZERO))
    }

    /// Like [`covers`](Self::covers), but a time here only has to be no
    /// later than `max(time there, horizon)`: every later departure happens
    /// after `horizon`, where both times mean "already serviced".
    pub fn covers_after(&self, other: &ServiceLog, horizon: Cost) -> bool {
        self.covers_with(other, Some(horizon))
    }

    fn covers_with(&self, other: &ServiceLog, horizon: Option<Cost>) -> bool {
        if other.records.len() > self.records.len() {
            return false;
        }
        let mut mine = self.records.iter().peekable();
        'outer: for &(e, t) in &other.records {
            while let Some(&&(m, mt)) = mine.peek() {
                mine.next();
                if m == e {
                    if horizon.is_some_and(|h| mt > t.max(h)) {
                        return false;
                    }
                    continue 'outer;
                }
                if m > e {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

impl FromIterator<(EdgeId, Cost)> for ServiceLog {
    fn from_iter<I: IntoIterator<Item = (EdgeId, Cost)>>(iter: I) -> Self {
        let mut log = ServiceLog::new();
        for (e, t) in iter {
            log.record(e, t);
        }
        log
    }
}

const TERMINATED: VertexId = VertexId::MAX;

/// Bucket key: only labels with equal keys are compared for dominance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelKey {
    pub convoy_pos: VertexId,
    pub service_pos: VertexId,
    pub sv_terminated: bool,
    pub waiting: bool,
}

#[derive(Clone, Debug)]
pub struct Label {
    pub convoy_pos: VertexId,
    pub service_pos: VertexId,
    pub convoy_time: Cost,
    /// Service-vehicle clock. It stops advancing once the vehicle terminates.
    pub service_time: Cost,
    pub total_cost: Cost,
    pub log: ServiceLog,
    pub sv_terminated: bool,
    pub waiting: bool,
    pub parent: Option<Arc<Label>>,
    /// The move that produced this label from `parent`.
    pub action: Option<ExtensionMove>,
}

impl Label {
    pub fn root(inst: &Instance) -> Label {
        Label {
            convoy_pos: inst.convoy_start(),
            service_pos: inst.service_start(),
            convoy_time: Cost::ZERO,
            service_time: Cost::ZERO,
            total_cost: Cost::ZERO,
            log: ServiceLog::new(),
            sv_terminated: false,
            waiting: false,
            parent: None,
            action: None,
        }
    }

    /// Once the service vehicle has stopped its position no longer affects
    /// any extension, so terminated labels share a key per convoy position.
    pub fn key(&self) -> LabelKey {
        LabelKey {
            convoy_pos: self.convoy_pos,
            service_pos: if self.sv_terminated { TERMINATED } else { self.service_pos },
            sv_terminated: self.sv_terminated,
            waiting: self.waiting,
        }
    }

    pub fn comparable(&self, other: &Label) -> bool {
        self.key() == other.key()
    }

    /// No vehicle departs along an edge before this time in any extension.
    pub fn horizon(&self) -> Cost {
        if self.sv_terminated {
            self.convoy_time
        } else {
            self.convoy_time.min(self.service_time)
        }
    }

    /// Labels from the root down to `self`.
    pub fn chain(self: &Arc<Self>) -> Vec<Arc<Label>> {
        let mut out = vec![Arc::clone(self)];
        let mut cur = self;
        while let Some(p) = &cur.parent {
            out.push(Arc::clone(p));
            cur = p;
        }
        out.reverse();
        out
    }
}

/// How a vehicle crosses one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Traversal {
    pub depart: Cost,
    pub arrive: Cost,
    /// The vehicle paid the impeded cost, i.e. it serviced the edge itself.
    pub paid_impeded: bool,
}

/// Earliest crossing of `edge` by `vehicle` when ready at `ready`, given the
/// edge's recorded service time (if any).
///
/// An impeded edge serviced at `t` costs `min(impeded, unimpeded + max(0, t - ready))`:
/// the vehicle either repairs it now or waits for the recorded service.
pub fn crossing(
    ready: Cost,
    edge: &Edge,
    vehicle: Vehicle,
    serviced_at: Option<Cost>,
) -> Result<Traversal, LabelError> {
    let (unimpeded, impeded) = match vehicle {
        Vehicle::Convoy => (edge.weights.convoy_unimpeded, edge.weights.convoy_impeded),
        Vehicle::Service => (edge.weights.service_unimpeded, edge.weights.service_impeded),
    };
    let add = |a: Cost, b: Cost| a.checked_add(b).ok_or(LabelError::Overflow);
    if !edge.impeded {
        return Ok(Traversal { depart: ready, arrive: add(ready, unimpeded)?, paid_impeded: false });
    }
    let direct = add(ready, impeded)?;
    if let Some(t) = serviced_at {
        let depart = ready.max(t);
        let waited = add(depart, unimpeded)?;
        if waited <= direct {
            return Ok(Traversal { depart, arrive: waited, paid_impeded: false });
        }
    }
    Ok(Traversal { depart: ready, arrive: direct, paid_impeded: true })
}

fn has_unserviced_impeded(label: &Label, inst: &Instance, v: VertexId) -> bool {
    inst.incident(v).iter().any(|&(_, e)| inst.is_impeded(e) && !label.log.contains(e))
}

fn check_move(label: &Label, mv: ExtensionMove, inst: &Instance) -> Result<(), LabelError> {
    let fail = |reason| Err(LabelError::InfeasibleMove { mv, reason });
    if label.convoy_pos == inst.destination() {
        return Err(LabelError::AtDestination);
    }
    match (mv.convoy, mv.service) {
        (Step::Stay, Step::Stay) => return fail("both vehicles stay"),
        (Step::Stay, _) if label.sv_terminated => return fail("convoy cannot wait after termination"),
        (Step::Stay, _) if !label.waiting && !has_unserviced_impeded(label, inst, label.convoy_pos) => {
            return fail("convoy only waits at an endpoint of an unserviced impeded edge")
        }
        _ => {}
    }
    if let Step::Cross(e) = mv.convoy {
        if e.0 >= inst.edge_count() || !inst.edge(e).touches(label.convoy_pos) {
            return fail("convoy edge is not incident to the convoy position");
        }
        if label.waiting && !label.log.contains(e) {
            return fail("a waiting convoy only leaves along serviced edges");
        }
    }
    if let Step::Cross(e) = mv.service {
        if label.sv_terminated {
            return fail("terminated service vehicle cannot move");
        }
        if e.0 >= inst.edge_count() || !inst.edge(e).touches(label.service_pos) {
            return fail("service edge is not incident to the service position");
        }
    }
    Ok(())
}

/// Applies one joint move to `parent`.
pub fn ref_extend(parent: &Arc<Label>, mv: ExtensionMove, inst: &Instance) -> Result<Label, LabelError> {
    check_move(parent, mv, inst)?;
    let mut log = parent.log.clone();

    // Both crossings see the parent's log: simultaneous traversals of the same
    // unserviced edge both pay the impeded cost.
    let (service_pos, service_time, service_trip) = match mv.service {
        Step::Cross(e) => {
            let edge = inst.edge(e);
            let trip = crossing(parent.service_time, edge, Vehicle::Service, parent.log.get(e))?;
            (edge.other(parent.service_pos), trip.arrive, Some((e, trip)))
        }
        Step::Stay => (parent.service_pos, parent.service_time, None),
    };
    let (convoy_pos, convoy_time, convoy_trip) = match mv.convoy {
        Step::Cross(e) => {
            let edge = inst.edge(e);
            let trip = crossing(parent.convoy_time, edge, Vehicle::Convoy, parent.log.get(e))?;
            (edge.other(parent.convoy_pos), trip.arrive, Some((e, trip)))
        }
        Step::Stay => (parent.convoy_pos, parent.convoy_time.max(service_time), None),
    };
    for (e, trip) in [convoy_trip, service_trip].into_iter().flatten() {
        if inst.is_impeded(e) {
            log.record(e, trip.arrive);
        }
    }

    let total_cost = parent
        .total_cost
        .checked_add(convoy_time.saturating_sub(parent.convoy_time))
        .and_then(|c| c.checked_add(service_time.saturating_sub(parent.service_time)))
        .ok_or(LabelError::Overflow)?;

    Ok(Label {
        convoy_pos,
        service_pos,
        convoy_time,
        service_time,
        total_cost,
        log,
        sv_terminated: parent.sv_terminated || mv.service == Step::Stay,
        waiting: mv.convoy == Step::Stay,
        parent: Some(Arc::clone(parent)),
        action: Some(mv),
    })
}

/// All moves permitted from `label` under the termination and waiting rules.
pub fn enumerate_extensions(label: &Label, inst: &Instance) -> Result<Vec<ExtensionMove>, LabelError> {
    if label.convoy_pos == inst.destination() {
        return Err(LabelError::AtDestination);
    }
    let convoy_edges = inst.incident(label.convoy_pos);
    let mut moves = Vec::new();

    if label.sv_terminated {
        moves.extend(convoy_edges.iter().map(|&(_, e)| ExtensionMove::new(Step::Cross(e), Step::Stay)));
        return Ok(moves);
    }

    let service_edges = inst.incident(label.service_pos);
    let convoy_moves = convoy_edges.iter().map(|&(_, e)| e).filter(|&e| !label.waiting || label.log.contains(e));
    for ce in convoy_moves {
        for &(_, se) in service_edges {
            moves.push(ExtensionMove::new(Step::Cross(ce), Step::Cross(se)));
        }
        moves.push(ExtensionMove::new(Step::Cross(ce), Step::Stay));
    }
    if label.waiting || has_unserviced_impeded(label, inst, label.convoy_pos) {
        for &(_, se) in service_edges {
            moves.push(ExtensionMove::new(Step::Stay, Step::Cross(se)));
        }
    }
    Ok(moves)
}

/// Which dominance conditions are enforced. Anything but `Full` is unsound
/// and exists to check that the verification harness notices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DominanceRule {
    #[default]
    Full,
    IgnoreServiceTimes,
    /// Compares the two clocks only.
    ClocksOnly,
}

/// `a` dominates `b`: both clocks no later, a superset of serviced edges,
/// and each of `b`'s service times matched no later (or before `a` can next
/// depart anywhere, see [`Label::horizon`]). Equal labels dominate each other.
pub fn dominates(a: &Label, b: &Label) -> Result<bool, LabelError> {
    if !a.comparable(b) {
        return Err(LabelError::NotComparable);
    }
    Ok(dominates_unchecked(a, b, DominanceRule::Full))
}

pub(crate) fn dominates_unchecked(a: &Label, b: &Label, rule: DominanceRule) -> bool {
    let clocks = a.convoy_time <= b.convoy_time && a.service_time <= b.service_time;
    match rule {
        DominanceRule::Full => clocks && a.log.covers_with(&b.log, Some(a.horizon())),
        DominanceRule::IgnoreServiceTimes => clocks && a.log.covers_with(&b.log, None),
        DominanceRule::ClocksOnly => clocks,
    }
}
