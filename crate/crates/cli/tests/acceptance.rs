//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
//!
//! Tolerances and budgets are pinned below. Timings are wall-clock on the
//! machine running the suite.

#[path = "../../core/tests/common/props.rs"]
mod props;

use std::time::{Duration, Instant};

use aspp_cli::bench::{
    self, class1_instances, class1_summary, class2_instances, class2_summary, compare_instances, Class1Config,
    Class2Config, CompareConfig, RunLimits,
};
use aspp_cli::verify::{run_verify, VerifyConfig};
use aspp_core::samples::{grid_5x10, six_vertex};
use aspp_core::solvers::{compute_upper_bound, validate_solution};
use aspp_core::{solve, Algorithm, Cost, GridShape, SolverOptions};
use proptest::test_runner::{Config, TestRunner};

const SIX_VERTEX_LIMIT: Duration = Duration::from_secs(1);
const GRID_LIMIT: Duration = Duration::from_secs(30);
const VERIFY_LIMIT: Duration = Duration::from_secs(600);
const CUTS_LIMIT: Duration = Duration::from_secs(1800);
const COMPARE_RATIO: f64 = 0.05;
const CUTS_INVERSION: f64 = 0.02;
const CUTS_REFERENCE_OPT: f64 = 191.0;
const CUTS_REFERENCE_TOLERANCE: f64 = 0.10;
const CLASS1_BUDGET: u64 = 20_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn six_vertex_sample() -> Outcome {
    let inst = six_vertex();
    let ub = compute_upper_bound(&inst).map_err(|e| e.to_string())?;
    ensure(ub == Cost::units(30), format!("upper bound {ub}, expected 30"))?;
    let mut notes = vec![format!("UB {ub}")];
    for algo in [Algorithm::Gpla, Algorithm::GplaStar] {
        let started = Instant::now();
        let sol = solve(&inst, algo, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let took = started.elapsed();
        ensure(sol.total_cost == Cost::units(26), format!("{algo} cost {}", sol.total_cost))?;
        ensure(sol.convoy_waits() == vec![(1, Cost::units(1))], format!("{algo} waits {:?}", sol.convoy_waits()))?;
        ensure(sol.service_vertices() == vec![3, 1, 2], format!("{algo} service path {:?}", sol.service_vertices()))?;
        ensure(sol.terminal == Some(2), format!("{algo} terminal {:?}", sol.terminal))?;
        validate_solution(&inst, &sol).map_err(|e| format!("{algo}: {e}"))?;
        ensure(took < SIX_VERTEX_LIMIT, format!("{algo} took {took:?}"))?;
        notes.push(format!("{algo} {} in {took:.1?}", sol.total_cost));
    }
    Ok(notes.join(", "))
}

fn fixed_grid() -> Outcome {
    let inst = grid_5x10();
    let shape = GridShape { rows: 5, cols: 10 };
    let started = Instant::now();
    let sol = solve(&inst, Algorithm::GplaStar, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let took = started.elapsed();
    ensure(sol.total_cost == Cost::units(172), format!("cost {}", sol.total_cost))?;
    let waits = sol.convoy_waits();
    ensure(waits == vec![(shape.vertex(2, 0), Cost::units(4))], format!("waits {waits:?}"))?;
    validate_solution(&inst, &sol).map_err(|e| e.to_string())?;
    ensure(took < GRID_LIMIT, format!("took {took:?}"))?;
    Ok(format!("cost 172, wait 4 at (2, 0), {} serviced edges, {took:.1?}", sol.serviced.len()))
}

fn oracle_agreement() -> Outcome {
    let started = Instant::now();
    let report = run_verify(&VerifyConfig { n: 100, ..Default::default() }).map_err(|e| e.to_string())?;
    let took = started.elapsed();
    if let Some(bad) = report.cases.iter().find(|c| !c.agrees()) {
        return Err(format!("instance {} (seed {}): {}", bad.index, bad.seed, bad.problem.as_deref().unwrap_or("")));
    }
    ensure(report.cases.iter().all(|c| c.gpla_valid && c.gpla_star_valid), "a solution failed validation")?;
    ensure(took < VERIFY_LIMIT, format!("took {took:?}"))?;
    Ok(format!("{}/{} agree and validate, {took:.0?}", report.agreeing(), report.cases.len()))
}

fn label_counts() -> Outcome {
    let cfg = CompareConfig { sizes: vec![(4, 4)], fraction: 0.1, n: 50, ..CompareConfig::desk() };
    let pairs = compare_instances(&cfg).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for p in &pairs {
        ensure(p.agree() == Some(true), format!("{}: solvers disagree or failed", p.gpla.instance))?;
        ensure(
            p.gpla_star.extended <= p.gpla.extended,
            format!("{}: {} > {}", p.gpla.instance, p.gpla_star.extended, p.gpla.extended),
        )?;
        ratios.push(p.gpla_star.extended as f64 / p.gpla.extended as f64);
    }
    let mean = bench::mean(&ratios);
    ensure(mean < COMPARE_RATIO, format!("mean ratio {mean:.4}"))?;
    Ok(format!("{} instances, mean extended ratio {mean:.5}", pairs.len()))
}

/// Adjacent pairs violating `ok`, allowing one violation smaller than the tolerance.
fn trend_holds(xs: &[f64], ok: impl Fn(f64, f64) -> bool) -> bool {
    let bad: Vec<f64> = xs.windows(2).filter(|w| !ok(w[0], w[1])).map(|w| (w[1] - w[0]).abs()).collect();
    bad.is_empty() || (bad.len() == 1 && bad[0] < CUTS_INVERSION)
}

fn cut_trends() -> Outcome {
    let started = Instant::now();
    let cfg = Class2Config {
        n: 30,
        limits: RunLimits { timeout: Duration::from_secs(600), max_extended: None },
        ..Class2Config::desk()
    };
    let runs = class2_instances(&cfg).map_err(|e| e.to_string())?;
    let rows = class2_summary(&cfg, &runs);
    let took = started.elapsed();
    let over_ub: Vec<f64> = rows.iter().map(|r| r.mean_opt_over_ub).collect();
    let over_lb: Vec<f64> = rows.iter().map(|r| r.mean_opt_over_lb).collect();
    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
    ensure(trend_holds(&over_ub, |a, b| b <= a), format!("OPT/UB not non-increasing: {}", fmt(&over_ub)))?;
    ensure(trend_holds(&over_lb, |a, b| b >= a), format!("OPT/LB not non-decreasing: {}", fmt(&over_lb)))?;
    let first = rows[0].mean_opt;
    let (lo, hi) =
        (CUTS_REFERENCE_OPT * (1.0 - CUTS_REFERENCE_TOLERANCE), CUTS_REFERENCE_OPT * (1.0 + CUTS_REFERENCE_TOLERANCE));
    ensure((lo..=hi).contains(&first), format!("one-cut mean OPT {first:.1} outside [{lo:.1}, {hi:.1}]"))?;
    ensure(took < CUTS_LIMIT, format!("took {took:?}"))?;
    let solved: usize = rows.iter().map(|r| r.solved).sum();
    Ok(format!(
        "OPT/UB {} | OPT/LB {} | one-cut OPT {first:.1} | {solved}/{} solved, {took:.0?}",
        fmt(&over_ub),
        fmt(&over_lb),
        runs.len()
    ))
}

fn property_suite() -> Outcome {
    let config = Config { cases: props::CASES, failure_persistence: None, ..Config::default() };
    let run = |name: &str, result: Result<(), String>| result.map_err(|e| format!("{name}: {e}"));
    run(
        "extension monotone",
        TestRunner::new(config.clone())
            .run(&(props::small_instance(), props::walk_input()), |(inst, w)| {
                props::check_extension_monotone(&inst, &w)
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "dominance preserved",
        TestRunner::new(config.clone())
            .run(&(props::small_instance(), props::walk_input(), props::knob_input()), |(inst, w, k)| {
                props::check_dominance_preserved(&inst, &w, &k)
            })
            .map_err(|e| e.to_string()),
    )?;
    run(
        "priority chain",
        TestRunner::new(config.clone())
            .run(&props::small_instance(), |inst| props::check_priority_chain(&inst))
            .map_err(|e| e.to_string()),
    )?;
    run(
        "bounds",
        TestRunner::new(config)
            .run(&props::small_instance(), |inst| props::check_bounds(&inst))
            .map_err(|e| e.to_string()),
    )?;
    Ok(format!("4 properties x {} cases", props::CASES))
}

fn solve_rate() -> Outcome {
    let cfg = Class1Config {
        limits: RunLimits { timeout: Duration::from_secs(600), max_extended: Some(CLASS1_BUDGET) },
        ..Class1Config::desk()
    };
    let runs = class1_instances(&cfg).map_err(|e| e.to_string())?;
    let rows = class1_summary(&cfg, &runs);
    let header = csv_header(&rows)?;
    ensure(header.iter().any(|h| h == "gamma"), "no gamma column")?;
    let mut notes = Vec::new();
    for &size in &cfg.sizes {
        let gammas: Vec<f64> = rows.iter().filter(|r| r.size == format!("{size}x{size}")).map(|r| r.gamma).collect();
        ensure(gammas.windows(2).all(|w| w[1] <= w[0]), format!("{size}x{size} gamma {gammas:?}"))?;
        notes.push(format!("{size}x{size} {gammas:?}"));
    }
    Ok(format!("budget {CLASS1_BUDGET} extended: {}", notes.join(", ")))
}

fn csv_header<T: serde::Serialize>(rows: &[T]) -> Result<Vec<String>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(rows.first().ok_or("empty summary")?).map_err(|e| e.to_string())?;
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    let text = String::from_utf8(bytes).map_err(|e| e.to_string())?;
    Ok(text.lines().next().unwrap_or("").split(',').map(str::to_owned).collect())
}

fn main() {
    aspp_cli::init_thread_pool();
    let criteria: [Criterion; 7] = [
        ("six-vertex sample", six_vertex_sample),
        ("fixed-cost 5x10 grid", fixed_grid),
        ("solvers agree with the oracle", oracle_agreement),
        ("best-first extends fewer labels", label_counts),
        ("cut-count trends", cut_trends),
        ("label and bound properties", property_suite),
        ("solve rate falls with impeded fraction", solve_rate),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
