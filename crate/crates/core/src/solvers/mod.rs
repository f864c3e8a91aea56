//! Exact solvers.
//!
//! [`solve_gpla`] exhausts the non-dominated label space with LIFO selection
//! and returns the cheapest destination label. [`solve_gpla_star`] selects
//! labels best-first on `f = cost + h(convoy position)`, discards children
//! whose `f` exceeds the convoy-alone upper bound, and stops at the first
//! destination label it selects.

mod search;
mod solution;
mod validate;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::Cost;
use crate::instance::Instance;
use crate::labeling::{DominanceRule, LabelError};
use crate::paths::{solo_shortest_path, PathError, WeightSelector};

pub use search::{search, SearchOutcome};
pub use solution::{reconstruct_solution, ServiceRecord, Solution, VisitEvent};
pub use validate::{validate_solution, ValidationError};

/// Default wall-clock budget per solve.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(900);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "gpla")]
    Gpla,
    #[serde(rename = "gpla-star")]
    GplaStar,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Gpla => "gpla",
            Algorithm::GplaStar => "gpla-star",
        })
    }
}

/// Limits on a single run. `max_extended` gives a machine-independent cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub timeout: Duration,
    pub max_extended: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { timeout: DEFAULT_TIMEOUT, max_extended: None }
    }
}

impl Budget {
    pub fn with_timeout(timeout: Duration) -> Self {
        Budget { timeout, max_extended: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverOptions {
    pub budget: Budget,
    pub dominance: DominanceRule,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    /// Children produced by the extension function.
    pub generated: u64,
    /// Labels taken from the open list and extended.
    pub extended: u64,
    /// New labels rejected because a stored label dominates them.
    pub dominance_pruned: u64,
    /// Stored labels discarded because a newer label dominates them.
    pub dominance_evicted: u64,
    /// Children discarded because `f` exceeded the upper bound.
    pub cost_filtered: u64,
    pub peak_open: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    WallClock,
    ExtendedLabels,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("search budget exhausted ({limit:?}) after {} extended labels", stats.extended)]
    Timeout { limit: Limit, stats: SolverStats },
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// Cost of the convoy's best path with no help: `T^u` on clear edges, `T^i` on impeded ones.
pub fn compute_upper_bound(inst: &Instance) -> Result<Cost, PathError> {
    Ok(solo_shortest_path(inst, inst.convoy_start(), inst.destination(), WeightSelector::ConvoySolo)?.cost)
}

/// Cost of the convoy's best path if every impeded edge were clear (`h` at the start).
pub fn compute_lower_bound(inst: &Instance) -> Result<Cost, PathError> {
    Ok(solo_shortest_path(inst, inst.convoy_start(), inst.destination(), WeightSelector::ConvoyUnimpededEverywhere)?
        .cost)
}

pub fn solve(inst: &Instance, algorithm: Algorithm, options: &SolverOptions) -> Result<Solution, SolveError> {
    let outcome = search(inst, algorithm, options)?;
    let mut solution = reconstruct_solution(&outcome.label, inst)?;
    solution.stats = outcome.stats;
    Ok(solution)
}

pub fn solve_gpla(inst: &Instance, budget: Budget) -> Result<Solution, SolveError> {
    solve(inst, Algorithm::Gpla, &SolverOptions { budget, ..Default::default() })
}

pub fn solve_gpla_star(inst: &Instance, budget: Budget) -> Result<Solution, SolveError> {
    solve(inst, Algorithm::GplaStar, &SolverOptions { budget, ..Default::default() })
}
