//! Cross-check of both solvers against the brute-force oracle and the
//! trajectory validator on small seeded grids.

use std::time::Duration;

use anyhow::Result;
use aspp_core::instances::{generate_grid, CostMode, GeneratorConfig, ImpededMode};
use aspp_core::labeling::DominanceRule;
use aspp_core::oracle::{oracle_solve, OracleConfig};
use aspp_core::solvers::validate_solution;
use aspp_core::{solve, Algorithm, Budget, Cost, Instance, SolverOptions};
use rayon::prelude::*;
use serde::Serialize;

use crate::bench::derive_seed;

pub const VERIFY_SIZES: [(usize, usize); 2] = [(3, 3), (4, 3)];
pub const VERIFY_FRACTIONS: [f64; 3] = [0.1, 0.2, 0.3];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub n: usize,
    /// Oracle walk length bound; `None` uses `|V| + 2|K|`.
    pub bound: Option<usize>,
    pub base_seed: u64,
    pub timeout: Duration,
    pub dominance: DominanceRule,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 100,
            bound: None,
            base_seed: 1,
            timeout: Duration::from_secs(300),
            dominance: DominanceRule::Full,
        }
    }
}

/// Instance `i` of the verification series.
pub fn verify_instance(base_seed: u64, i: usize) -> Result<(GeneratorConfig, Instance)> {
    let (rows, cols) = VERIFY_SIZES[i % VERIFY_SIZES.len()];
    let fraction = VERIFY_FRACTIONS[(i / VERIFY_SIZES.len()) % VERIFY_FRACTIONS.len()];
    let seed = derive_seed(base_seed, 200, i as u64);
    let cfg = GeneratorConfig::new(rows, cols, seed, ImpededMode::Fraction(fraction), CostMode::Ranged);
    let inst = generate_grid(&cfg)?;
    Ok((cfg, inst))
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCase {
    pub index: usize,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub fraction: f64,
    pub gpla: Option<f64>,
    pub gpla_star: Option<f64>,
    pub oracle: Option<f64>,
    pub gpla_valid: bool,
    pub gpla_star_valid: bool,
    /// First problem found, if any.
    pub problem: Option<String>,
}

impl VerifyCase {
    pub fn agrees(&self) -> bool {
        self.problem.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub cases: Vec<VerifyCase>,
}

impl VerifyReport {
    pub fn agreeing(&self) -> usize {
        self.cases.iter().filter(|c| c.agrees()).count()
    }

    pub fn all_agree(&self) -> bool {
        self.agreeing() == self.cases.len()
    }
}

fn check_case(config: &VerifyConfig, index: usize) -> Result<VerifyCase> {
    let (gen, inst) = verify_instance(config.base_seed, index)?;
    let fraction = match gen.impeded {
        ImpededMode::Fraction(f) => f,
        ImpededMode::Cuts(_) => unreachable!("verification uses impeded fractions"),
    };
    let mut case = VerifyCase {
        index,
        seed: gen.seed,
        rows: gen.rows,
        cols: gen.cols,
        fraction,
        gpla: None,
        gpla_star: None,
        oracle: None,
        gpla_valid: false,
        gpla_star_valid: false,
        problem: None,
    };
    let options = SolverOptions { budget: Budget::with_timeout(config.timeout), dominance: config.dominance };
    let mut problems = Vec::new();
    let mut costs: Vec<(&str, Cost)> = Vec::new();

    for algorithm in [Algorithm::Gpla, Algorithm::GplaStar] {
        match solve(&inst, algorithm, &options) {
            Ok(sol) => {
                let valid = match validate_solution(&inst, &sol) {
                    Ok(()) => true,
                    Err(err) => {
                        problems.push(format!("{algorithm} solution invalid: {err}"));
                        false
                    }
                };
                match algorithm {
                    Algorithm::Gpla => {
                        case.gpla = Some(sol.total_cost.as_units());
                        case.gpla_valid = valid;
                        costs.push(("gpla", sol.total_cost));
                    }
                    Algorithm::GplaStar => {
                        case.gpla_star = Some(sol.total_cost.as_units());
                        case.gpla_star_valid = valid;
                        costs.push(("gpla-star", sol.total_cost));
                    }
                }
            }
            Err(err) => problems.push(format!("{algorithm} failed: {err}")),
        }
    }

    let mut oracle_config = OracleConfig::for_instance(&inst);
    if let Some(b) = config.bound {
        oracle_config.bound = b;
    }
    match oracle_solve(&inst, oracle_config) {
        Ok(outcome) => {
            case.oracle = Some(outcome.cost.as_units());
            costs.push(("oracle", outcome.cost));
        }
        Err(err) => problems.push(format!("oracle failed: {err}")),
    }

    if let Some(&(_, first)) = costs.first() {
        if costs.iter().any(|&(_, c)| c != first) {
            let listed: Vec<String> = costs.iter().map(|(name, c)| format!("{name}={c}")).collect();
            problems.push(format!("costs differ: {}", listed.join(", ")));
        }
    }
    case.problem = (!problems.is_empty()).then(|| problems.join("; "));
    Ok(case)
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    let cases = (0..config.n).into_par_iter().map(|i| check_case(config, i)).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { cases })
}
