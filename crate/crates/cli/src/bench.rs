//! Experiment sweeps. Every sweep is a pure function of its config: seeds
//! are derived from the instance index, runs execute on a rayon pool and
//! results come back in instance order.

use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use aspp_core::instances::{generate_grid, CostMode, GeneratorConfig, ImpededMode, ServiceStart};
use aspp_core::solvers::{compute_lower_bound, compute_upper_bound, validate_solution};
use aspp_core::{solve, Algorithm, Budget, Instance, SolveError, SolverOptions};
use rayon::prelude::*;
use serde::Serialize;

/// One solver run on one generated instance.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub algorithm: String,
    pub impeded: usize,
    pub edges: usize,
    pub no_cut: bool,
    pub success: bool,
    pub cost: Option<f64>,
    pub ub: Option<f64>,
    pub lb: Option<f64>,
    pub extended: u64,
    pub generated: u64,
    pub time_ms: f64,
}

impl BenchRecord {
    pub fn opt_over_ub(&self) -> Option<f64> {
        Some(self.cost? / self.ub?)
    }

    pub fn opt_over_lb(&self) -> Option<f64> {
        Some(self.cost? / self.lb?)
    }
}

/// Limits shared by every run of a sweep.
#[derive(Clone, Copy, Debug)]
pub struct RunLimits {
    pub timeout: Duration,
    pub max_extended: Option<u64>,
}

impl RunLimits {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            budget: Budget { timeout: self.timeout, max_extended: self.max_extended },
            ..Default::default()
        }
    }
}

pub fn run_one(id: String, seed: u64, inst: &Instance, algorithm: Algorithm, limits: RunLimits) -> Result<BenchRecord> {
    let grid = inst.grid();
    let ub = compute_upper_bound(inst)?;
    let lb = compute_lower_bound(inst)?;
    let mut record = BenchRecord {
        instance: id,
        seed,
        rows: grid.map_or(0, |g| g.rows),
        cols: grid.map_or(0, |g| g.cols),
        algorithm: algorithm.to_string(),
        impeded: inst.impeded_edges().len(),
        edges: inst.edge_count(),
        no_cut: !inst.impeded_set_separates(),
        success: false,
        cost: None,
        ub: None,
        lb: None,
        extended: 0,
        generated: 0,
        time_ms: 0.0,
    };
    match solve(inst, algorithm, &limits.options()) {
        Ok(sol) => {
            validate_solution(inst, &sol).with_context(|| format!("validating {}", record.instance))?;
            record.success = true;
            record.cost = Some(sol.total_cost.as_units());
            record.ub = Some(ub.as_units());
            record.lb = Some(lb.as_units());
            record.extended = sol.stats.extended;
            record.generated = sol.stats.generated;
            record.time_ms = sol.stats.elapsed_ms;
        }
        Err(SolveError::Timeout { stats, .. }) => {
            record.extended = stats.extended;
            record.generated = stats.generated;
            record.time_ms = stats.elapsed_ms;
        }
        Err(err) => return Err(err).with_context(|| format!("solving {}", record.instance)),
    }
    Ok(record)
}

/// Instance seed for index `i` of a named series.
pub fn derive_seed(base: u64, series: u64, i: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(series.wrapping_mul(1_000_003)).wrapping_add(i)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation (`n - 1` denominator); 0 for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn generate(cfg: &GeneratorConfig) -> Result<Instance> {
    generate_grid(cfg).with_context(|| format!("generating {}x{} seed {}", cfg.rows, cfg.cols, cfg.seed))
}

// ---- GPLA vs GPLA* ----

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub sizes: Vec<(usize, usize)>,
    pub fraction: f64,
    pub n: usize,
    pub base_seed: u64,
    pub limits: RunLimits,
}

impl CompareConfig {
    pub fn desk() -> Self {
        CompareConfig {
            sizes: vec![(4, 3), (4, 4)],
            fraction: 0.1,
            n: 10,
            base_seed: 1,
            limits: RunLimits { timeout: Duration::from_secs(60), max_extended: None },
        }
    }

    pub fn full() -> Self {
        CompareConfig {
            sizes: vec![(4, 3), (4, 4), (4, 5), (4, 6)],
            n: 50,
            limits: RunLimits { timeout: aspp_core::solvers::DEFAULT_TIMEOUT, max_extended: None },
            ..Self::desk()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparePair {
    pub gpla: BenchRecord,
    pub gpla_star: BenchRecord,
}

impl ComparePair {
    /// Both finished with the same cost.
    pub fn agree(&self) -> Option<bool> {
        Some(self.gpla.cost? == self.gpla_star.cost?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub size: String,
    pub n: usize,
    pub both_solved: usize,
    pub agree: usize,
    pub mean_t_gpla_ms: f64,
    pub mean_t_gpla_star_ms: f64,
    pub mean_o_gpla: f64,
    pub mean_o_gpla_star: f64,
}

pub fn compare_instances(cfg: &CompareConfig) -> Result<Vec<ComparePair>> {
    let jobs: Vec<(usize, usize, u64)> = cfg
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(s, &(r, c))| (0..cfg.n as u64).map(move |i| (r, c, derive_seed(cfg.base_seed, s as u64, i))))
        .collect();
    jobs.par_iter()
        .map(|&(rows, cols, seed)| {
            let gen = GeneratorConfig::new(rows, cols, seed, ImpededMode::Fraction(cfg.fraction), CostMode::Ranged);
            let inst = generate(&gen)?;
            let id = format!("cmp-{rows}x{cols}-{seed}");
            Ok(ComparePair {
                gpla: run_one(id.clone(), seed, &inst, Algorithm::Gpla, cfg.limits)?,
                gpla_star: run_one(id, seed, &inst, Algorithm::GplaStar, cfg.limits)?,
            })
        })
        .collect()
}

pub fn compare_summary(cfg: &CompareConfig, pairs: &[ComparePair]) -> Vec<CompareRow> {
    cfg.sizes
        .iter()
        .map(|&(rows, cols)| {
            let group: Vec<&ComparePair> =
                pairs.iter().filter(|p| p.gpla.rows == rows && p.gpla.cols == cols).collect();
            let solved: Vec<&&ComparePair> = group.iter().filter(|p| p.agree().is_some()).collect();
            let pick = |f: &dyn Fn(&ComparePair) -> f64| mean(&solved.iter().map(|p| f(p)).collect::<Vec<_>>());
            CompareRow {
                size: format!("{rows}x{cols}"),
                n: group.len(),
                both_solved: solved.len(),
                agree: solved.iter().filter(|p| p.agree() == Some(true)).count(),
                mean_t_gpla_ms: pick(&|p| p.gpla.time_ms),
                mean_t_gpla_star_ms: pick(&|p| p.gpla_star.time_ms),
                mean_o_gpla: pick(&|p| p.gpla.extended as f64),
                mean_o_gpla_star: pick(&|p| p.gpla_star.extended as f64),
            }
        })
        .collect()
}

// ---- Class 1: random impeded fractions ----

#[derive(Clone, Debug)]
pub struct Class1Config {
    pub sizes: Vec<usize>,
    pub fractions: Vec<f64>,
    pub n: usize,
    pub base_seed: u64,
    pub limits: RunLimits,
}

impl Class1Config {
    pub fn desk() -> Self {
        Class1Config {
            sizes: vec![6, 7],
            fractions: vec![0.3, 0.4, 0.5],
            n: 10,
            base_seed: 1,
            limits: RunLimits { timeout: Duration::from_secs(30), max_extended: None },
        }
    }

    pub fn full() -> Self {
        Class1Config {
            sizes: vec![6, 7, 8, 9, 10],
            n: 50,
            limits: RunLimits { timeout: aspp_core::solvers::DEFAULT_TIMEOUT, max_extended: None },
            ..Self::desk()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Class1Row {
    pub size: String,
    pub fraction: f64,
    pub n: usize,
    pub solved: usize,
    pub gamma: f64,
    pub mean_time_s: f64,
    pub sd_time_s: f64,
    pub no_cut: usize,
}

pub fn class1_instances(cfg: &Class1Config) -> Result<Vec<BenchRecord>> {
    let mut jobs = Vec::new();
    for (s, &size) in cfg.sizes.iter().enumerate() {
        for (k, &fraction) in cfg.fractions.iter().enumerate() {
            for i in 0..cfg.n as u64 {
                jobs.push((size, fraction, derive_seed(cfg.base_seed, (s * 16 + k) as u64, i)));
            }
        }
    }
    jobs.par_iter()
        .map(|&(size, fraction, seed)| {
            let gen = GeneratorConfig::new(size, size, seed, ImpededMode::Fraction(fraction), CostMode::Ranged);
            let inst = generate(&gen)?;
            run_one(format!("c1-{size}x{size}-f{fraction}-{seed}"), seed, &inst, Algorithm::GplaStar, cfg.limits)
        })
        .collect()
}

pub fn class1_summary(cfg: &Class1Config, records: &[BenchRecord]) -> Vec<Class1Row> {
    let mut rows = Vec::new();
    for &size in &cfg.sizes {
        for &fraction in &cfg.fractions {
            let tag = format!("-f{fraction}-");
            let group: Vec<&BenchRecord> =
                records.iter().filter(|r| r.rows == size && r.instance.contains(&tag)).collect();
            let times: Vec<f64> = group.iter().filter(|r| r.success).map(|r| r.time_ms / 1e3).collect();
            rows.push(Class1Row {
                size: format!("{size}x{size}"),
                fraction,
                n: group.len(),
                solved: times.len(),
                gamma: times.len() as f64 / group.len().max(1) as f64,
                mean_time_s: mean(&times),
                sd_time_s: std_dev(&times),
                no_cut: group.iter().filter(|r| r.no_cut).count(),
            });
        }
    }
    rows
}

// ---- Class 2: cut-based impeded sets on a long grid ----

#[derive(Clone, Debug)]
pub struct Class2Config {
    pub rows: usize,
    pub cols: usize,
    pub cuts: Vec<usize>,
    pub n: usize,
    pub base_seed: u64,
    pub limits: RunLimits,
}

impl Class2Config {
    pub fn desk() -> Self {
        Class2Config {
            rows: 3,
            cols: 15,
            cuts: vec![1, 2, 3, 4, 5],
            n: 10,
            base_seed: 1,
            limits: RunLimits { timeout: Duration::from_secs(60), max_extended: None },
        }
    }

    pub fn full() -> Self {
        Class2Config {
            n: 50,
            limits: RunLimits { timeout: aspp_core::solvers::DEFAULT_TIMEOUT, max_extended: None },
            ..Self::desk()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Class2Row {
    pub cuts: usize,
    pub n: usize,
    pub solved: usize,
    pub impeded_fraction: f64,
    pub mean_opt: f64,
    pub sd_opt: f64,
    pub mean_opt_over_ub: f64,
    pub mean_opt_over_lb: f64,
}

pub fn class2_instances(cfg: &Class2Config) -> Result<Vec<BenchRecord>> {
    let jobs: Vec<(usize, u64)> = cfg
        .cuts
        .iter()
        .flat_map(|&c| (0..cfg.n as u64).map(move |i| (c, derive_seed(cfg.base_seed, 100 + c as u64, i))))
        .collect();
    jobs.par_iter()
        .map(|&(cuts, seed)| {
            let gen = GeneratorConfig::new(cfg.rows, cfg.cols, seed, ImpededMode::Cuts(cuts), CostMode::Ranged);
            let inst = generate(&gen)?;
            run_one(format!("c2-cuts{cuts}-{seed}"), seed, &inst, Algorithm::GplaStar, cfg.limits)
        })
        .collect()
}

pub fn class2_summary(cfg: &Class2Config, records: &[BenchRecord]) -> Vec<Class2Row> {
    cfg.cuts
        .iter()
        .map(|&cuts| {
            let tag = format!("c2-cuts{cuts}-");
            let group: Vec<&BenchRecord> = records.iter().filter(|r| r.instance.starts_with(&tag)).collect();
            let solved: Vec<&&BenchRecord> = group.iter().filter(|r| r.success).collect();
            let opt: Vec<f64> = solved.iter().filter_map(|r| r.cost).collect();
            Class2Row {
                cuts,
                n: group.len(),
                solved: solved.len(),
                impeded_fraction: mean(&group.iter().map(|r| r.impeded as f64 / r.edges as f64).collect::<Vec<_>>()),
                mean_opt: mean(&opt),
                sd_opt: std_dev(&opt),
                mean_opt_over_ub: mean(&solved.iter().filter_map(|r| r.opt_over_ub()).collect::<Vec<_>>()),
                mean_opt_over_lb: mean(&solved.iter().filter_map(|r| r.opt_over_lb()).collect::<Vec<_>>()),
            }
        })
        .collect()
}

// ---- Class 3: cost as a function of the service start ----

#[derive(Clone, Debug)]
pub struct Class3Config {
    pub rows: usize,
    pub cols: usize,
    pub cuts: usize,
    pub n: usize,
    pub base_seed: u64,
    pub limits: RunLimits,
}

impl Class3Config {
    pub fn desk() -> Self {
        Class3Config {
            rows: 3,
            cols: 15,
            cuts: 3,
            n: 5,
            base_seed: 1,
            limits: RunLimits { timeout: Duration::from_secs(60), max_extended: None },
        }
    }

    pub fn full() -> Self {
        Class3Config {
            n: 50,
            limits: RunLimits { timeout: aspp_core::solvers::DEFAULT_TIMEOUT, max_extended: None },
            ..Self::desk()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Class3Row {
    pub col: usize,
    pub row: usize,
    pub n: usize,
    pub solved: usize,
    pub mean_opt: f64,
}

pub fn class3_instances(cfg: &Class3Config) -> Result<Vec<BenchRecord>> {
    let vertices = cfg.rows * cfg.cols;
    let jobs: Vec<(u64, usize)> =
        (0..cfg.n as u64).flat_map(|i| (0..vertices).map(move |q| (derive_seed(cfg.base_seed, 300, i), q))).collect();
    jobs.par_iter()
        .map(|&(seed, q)| {
            let mut gen = GeneratorConfig::new(cfg.rows, cfg.cols, seed, ImpededMode::Cuts(cfg.cuts), CostMode::Fixed);
            gen.service_start = ServiceStart::Vertex(q);
            let inst = generate(&gen)?;
            run_one(format!("c3-{seed}-q{q}"), seed, &inst, Algorithm::GplaStar, cfg.limits)
        })
        .collect()
}

pub fn class3_summary(cfg: &Class3Config, records: &[BenchRecord]) -> Vec<Class3Row> {
    let vertices = cfg.rows * cfg.cols;
    (0..vertices)
        .map(|q| {
            let tag = format!("-q{q}");
            let group: Vec<&BenchRecord> = records.iter().filter(|r| r.instance.ends_with(&tag)).collect();
            let opt: Vec<f64> = group.iter().filter_map(|r| r.cost).collect();
            Class3Row { col: q / cfg.rows, row: q % cfg.rows, n: group.len(), solved: opt.len(), mean_opt: mean(&opt) }
        })
        .collect()
}
