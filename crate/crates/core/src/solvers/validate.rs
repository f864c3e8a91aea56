//! Forward simulation of a solution, written against the instance only.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cost::Cost;
use crate::instance::{EdgeId, Instance, VertexId};
use crate::labeling::Vehicle;

use super::{Solution, VisitEvent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("{vehicle:?} trajectory is empty")]
    EmptyTrajectory { vehicle: Vehicle },
    #[error("{vehicle:?} starts at {found}, expected {expected}")]
    WrongStart { vehicle: Vehicle, expected: VertexId, found: VertexId },
    #[error("{vehicle:?} trajectory does not start at time 0")]
    StartTime { vehicle: Vehicle },
    #[error("convoy ends at {found}, expected {expected}")]
    WrongEnd { expected: VertexId, found: VertexId },
    #[error("{vehicle:?} step {index}: no edge between {from} and {to}")]
    InfeasibleStep { vehicle: Vehicle, index: usize, from: VertexId, to: VertexId },
    #[error("{vehicle:?} event {index}: departs before it arrives")]
    NegativeWait { vehicle: Vehicle, index: usize },
    #[error("{vehicle:?} step {index}: arrival {found}, simulation gives {expected}")]
    ArrivalMismatch { vehicle: Vehicle, index: usize, expected: Cost, found: Cost },
    #[error("serviced-edge schedule differs from the simulation: {0}")]
    ServiceSchedule(String),
    #[error("terminal vertex {found:?}, expected {expected:?}")]
    TerminalMismatch { expected: Option<VertexId>, found: Option<VertexId> },
    #[error("total cost {found}, simulation gives {expected}")]
    CostMismatch { expected: Cost, found: Cost },
    #[error("time arithmetic overflows")]
    Overflow,
}

struct Move {
    vehicle: Vehicle,
    index: usize,
    edge: EdgeId,
    depart: Cost,
    claimed: Cost,
}

fn check_track(
    inst: &Instance,
    vehicle: Vehicle,
    events: &[VisitEvent],
    start: VertexId,
    moves: &mut Vec<Move>,
) -> Result<(), ValidationError> {
    let first = events.first().ok_or(ValidationError::EmptyTrajectory { vehicle })?;
    if first.vertex != start {
        return Err(ValidationError::WrongStart { vehicle, expected: start, found: first.vertex });
    }
    if first.arrive != Cost::ZERO {
        return Err(ValidationError::StartTime { vehicle });
    }
    for (index, ev) in events.iter().enumerate() {
        if ev.vertex >= inst.vertex_count() {
            return Err(ValidationError::InfeasibleStep { vehicle, index, from: ev.vertex, to: ev.vertex });
        }
        if ev.depart < ev.arrive {
            return Err(ValidationError::NegativeWait { vehicle, index });
        }
    }
    for (i, pair) in events.windows(2).enumerate() {
        let (from, to) = (pair[0].vertex, pair[1].vertex);
        let index = i + 1;
        let edge = inst.edge_between(from, to).ok_or(ValidationError::InfeasibleStep { vehicle, index, from, to })?;
        moves.push(Move { vehicle, index, edge, depart: pair[0].depart, claimed: pair[1].arrive });
    }
    Ok(())
}

/// Replays both trajectories in departure order. An impeded edge counts as
/// serviced for a traversal departing at `s` iff some earlier traversal paid
/// the impeded cost and arrived by `s`.
pub fn validate_solution(inst: &Instance, sol: &Solution) -> Result<(), ValidationError> {
    let mut moves = Vec::new();
    check_track(inst, Vehicle::Convoy, &sol.convoy, inst.convoy_start(), &mut moves)?;
    check_track(inst, Vehicle::Service, &sol.service, inst.service_start(), &mut moves)?;
    let last = sol.convoy.last().expect("checked non-empty").vertex;
    if last != inst.destination() {
        return Err(ValidationError::WrongEnd { expected: inst.destination(), found: last });
    }

    moves.sort_by_key(|m| (m.depart, m.claimed));
    let mut completions: BTreeMap<EdgeId, (Cost, Vehicle)> = BTreeMap::new();
    for m in &moves {
        let edge = inst.edge(m.edge);
        let w = &edge.weights;
        let (clear, blocked) = match m.vehicle {
            Vehicle::Convoy => (w.convoy_unimpeded, w.convoy_impeded),
            Vehicle::Service => (w.service_unimpeded, w.service_impeded),
        };
        let open = !edge.impeded || completions.get(&m.edge).is_some_and(|&(t, _)| t <= m.depart);
        let duration = if open { clear } else { blocked };
        let expected = m.depart.checked_add(duration).ok_or(ValidationError::Overflow)?;
        if expected != m.claimed {
            return Err(ValidationError::ArrivalMismatch {
                vehicle: m.vehicle,
                index: m.index,
                expected,
                found: m.claimed,
            });
        }
        if !open {
            let entry = completions.entry(m.edge).or_insert((expected, m.vehicle));
            if expected < entry.0 || (expected == entry.0 && m.vehicle == Vehicle::Service) {
                *entry = (expected, m.vehicle);
            }
        }
    }

    let mut claimed: Vec<(EdgeId, Cost, Vehicle)> = Vec::with_capacity(sol.serviced.len());
    for rec in &sol.serviced {
        let e = inst
            .edge_between(rec.a, rec.b)
            .ok_or_else(|| ValidationError::ServiceSchedule(format!("({}, {}) is not an edge", rec.a, rec.b)))?;
        claimed.push((e, rec.time, rec.by));
    }
    claimed.sort_by_key(|&(e, _, _)| e);
    let simulated: Vec<_> = completions.iter().map(|(&e, &(t, by))| (e, t, by)).collect();
    if claimed != simulated {
        return Err(ValidationError::ServiceSchedule(format!("claimed {claimed:?}, simulated {simulated:?}")));
    }

    let expected_terminal = (sol.service.len() > 1).then(|| sol.service.last().expect("checked non-empty").vertex);
    if sol.terminal != expected_terminal {
        return Err(ValidationError::TerminalMismatch { expected: expected_terminal, found: sol.terminal });
    }

    let convoy_end = sol.convoy.last().expect("checked non-empty").arrive;
    let service_end = sol.service.last().expect("checked non-empty").arrive;
    let expected = convoy_end.checked_add(service_end).ok_or(ValidationError::Overflow)?;
    if expected != sol.total_cost {
        return Err(ValidationError::CostMismatch { expected, found: sol.total_cost });
    }
    Ok(())
}
