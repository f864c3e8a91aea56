//! Small fixed instances with known optima.

use crate::instance::Instance;

const SIX_VERTEX: &str = include_str!("../data/six_vertex.json");
const GRID_5X10: &str = include_str!("../data/grid_5x10.json");

/// Six vertices `p, x, y, q, z, d` (ids 0..=5). Alone the convoy pays 30;
/// with the service vehicle clearing `(x, y)` the optimum is 26.
pub fn six_vertex() -> Instance {
    Instance::from_json(SIX_VERTEX).expect("bundled instance is valid")
}

/// 5 rows by 10 columns with fixed weights (10/40/1/6), `p = (0, 0)`,
/// `d = (9, 4)` and the service vehicle starting at `(7, 4)`. The optimum is
/// 172, with the convoy waiting 4 at `(2, 0)` for the service vehicle.
/// Several schedules attain it.
pub fn grid_5x10() -> Instance {
    Instance::from_json(GRID_5X10).expect("bundled instance is valid")
}
