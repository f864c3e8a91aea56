//! Exact solvers for the assisted shortest path problem: a convoy travels
//! from `p` to `d` over a graph whose impeded edges are slow until some
//! vehicle has crossed them once, and a fast service vehicle starting at `q`
//! may go ahead and clear them. The objective is the convoy's arrival time
//! plus the time the service vehicle spends moving.

pub mod cost;
pub mod instance;
pub mod instances;
pub mod labeling;
pub mod oracle;
pub mod paths;
pub mod samples;
pub mod solvers;

pub use cost::Cost;
pub use instance::{Edge, EdgeId, EdgeWeights, GridShape, Instance, InstanceError, VertexId};
pub use solvers::{
    solve, solve_gpla, solve_gpla_star, Algorithm, Budget, Solution, SolveError, SolverOptions, SolverStats,
};
