use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::instance::{EdgeId, Instance, VertexId};
use crate::labeling::{crossing, Label, Step, Vehicle};

use super::{SolveError, SolverStats};

/// A stop on a trajectory. `depart > arrive` marks a wait.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitEvent {
    #[serde(rename = "v")]
    pub vertex: VertexId,
    pub arrive: Cost,
    pub depart: Cost,
}

impl VisitEvent {
    pub fn wait(&self) -> Cost {
        self.depart.saturating_sub(self.arrive)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRecord {
    pub a: VertexId,
    pub b: VertexId,
    #[serde(rename = "t")]
    pub time: Cost,
    pub by: Vehicle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    #[serde(rename = "cost")]
    pub total_cost: Cost,
    pub convoy: Vec<VisitEvent>,
    pub service: Vec<VisitEvent>,
    /// Where the service vehicle stopped, or `None` if it never left its start.
    pub terminal: Option<VertexId>,
    pub serviced: Vec<ServiceRecord>,
    #[serde(default)]
    pub stats: SolverStats,
}

impl Solution {
    /// `(vertex, duration)` for every convoy stop with a positive wait.
    pub fn convoy_waits(&self) -> Vec<(VertexId, Cost)> {
        self.convoy.iter().filter(|ev| ev.depart > ev.arrive).map(|ev| (ev.vertex, ev.wait())).collect()
    }

    pub fn convoy_vertices(&self) -> Vec<VertexId> {
        self.convoy.iter().map(|ev| ev.vertex).collect()
    }

    pub fn service_vertices(&self) -> Vec<VertexId> {
        self.service.iter().map(|ev| ev.vertex).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solutions always serialize")
    }

    pub fn from_json(text: &str) -> Result<Solution, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }
}

struct Track {
    events: Vec<VisitEvent>,
}

impl Track {
    fn new(start: VertexId) -> Self {
        Track { events: vec![VisitEvent { vertex: start, arrive: Cost::ZERO, depart: Cost::ZERO }] }
    }

    fn cross(&mut self, to: VertexId, depart: Cost, arrive: Cost) {
        self.events.last_mut().expect("tracks are never empty").depart = depart;
        self.events.push(VisitEvent { vertex: to, arrive, depart: arrive });
    }
}

/// Converts a destination label into timed trajectories by replaying the
/// moves along its parent chain.
pub fn reconstruct_solution(label: &Arc<Label>, inst: &Instance) -> Result<Solution, SolveError> {
    let chain = label.chain();
    let root = &chain[0];
    if root.parent.is_some() || root.convoy_pos != inst.convoy_start() || root.service_pos != inst.service_start() {
        return Err(SolveError::Internal("label chain does not start at the root".into()));
    }
    if label.convoy_pos != inst.destination() {
        return Err(SolveError::Internal("label does not end at the destination".into()));
    }

    let mut convoy = Track::new(root.convoy_pos);
    let mut service = Track::new(root.service_pos);
    let mut payers: Vec<(EdgeId, Cost, Vehicle)> = Vec::new();

    for pair in chain.windows(2) {
        let (parent, child) = (&pair[0], &pair[1]);
        let mv = child.action.ok_or_else(|| SolveError::Internal("non-root label without an action".into()))?;
        let steps =
            [(mv.service, Vehicle::Service, parent.service_time), (mv.convoy, Vehicle::Convoy, parent.convoy_time)];
        for (step, vehicle, ready) in steps {
            let Step::Cross(e) = step else { continue };
            let edge = inst.edge(e);
            let trip = crossing(ready, edge, vehicle, parent.log.get(e))?;
            let track = match vehicle {
                Vehicle::Convoy => &mut convoy,
                Vehicle::Service => &mut service,
            };
            let from = track.events.last().expect("tracks are never empty").vertex;
            track.cross(edge.other(from), trip.depart, trip.arrive);
            if trip.paid_impeded {
                payers.push((e, trip.arrive, vehicle));
            }
        }
    }

    let serviced = label
        .log
        .iter()
        .map(|(e, t)| {
            let by = if payers.contains(&(e, t, Vehicle::Service)) {
                Vehicle::Service
            } else if payers.contains(&(e, t, Vehicle::Convoy)) {
                Vehicle::Convoy
            } else {
                return Err(SolveError::Internal(format!("no traversal accounts for the service of {e}")));
            };
            let edge = inst.edge(e);
            Ok(ServiceRecord { a: edge.a, b: edge.b, time: t, by })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let convoy_end = convoy.events.last().expect("tracks are never empty").arrive;
    let service_end = service.events.last().expect("tracks are never empty").arrive;
    let recomputed = convoy_end.checked_add(service_end).ok_or(crate::labeling::LabelError::Overflow)?;
    if recomputed != label.total_cost {
        return Err(SolveError::Internal(format!(
            "replayed cost {recomputed} differs from label cost {}",
            label.total_cost
        )));
    }
    let terminal = (service.events.len() > 1).then(|| service.events.last().expect("tracks are never empty").vertex);

    Ok(Solution {
        total_cost: label.total_cost,
        convoy: convoy.events,
        service: service.events,
        terminal,
        serviced,
        stats: SolverStats::default(),
    })
}
