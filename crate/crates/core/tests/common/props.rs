//! Invariant checks shared by the property tests and the acceptance run.

use std::sync::Arc;

use aspp_core::instances::{generate_grid, CostMode, GeneratorConfig, ImpededMode};
use aspp_core::labeling::{dominates, enumerate_extensions, ref_extend, Label, ServiceLog, Step};
use aspp_core::paths::{all_targets_shortest, WeightSelector};
use aspp_core::solvers::{compute_lower_bound, compute_upper_bound, search};
use aspp_core::{Algorithm, Cost, Instance, SolverOptions};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 10_000;

pub fn small_instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 2usize..=4, any::<u64>(), prop::sample::select(vec![0.2, 0.3, 0.5])).prop_map(
        |(rows, cols, seed, f)| {
            let cfg = GeneratorConfig::new(rows, cols, seed, ImpededMode::Fraction(f), CostMode::Ranged);
            generate_grid(&cfg).expect("small grids generate")
        },
    )
}

/// Follows `choices` from the root, stopping early at the destination.
pub fn random_walk(inst: &Instance, choices: &[usize]) -> Arc<Label> {
    let mut label = Arc::new(Label::root(inst));
    for &c in choices {
        if label.convoy_pos == inst.destination() {
            break;
        }
        let moves = enumerate_extensions(&label, inst).unwrap();
        if moves.is_empty() {
            break;
        }
        let mv = moves[c % moves.len()];
        label = Arc::new(ref_extend(&label, mv, inst).unwrap());
    }
    label
}

fn shrink(t: Cost, permille: u64) -> Cost {
    Cost::from_millis(t.millis() * permille / 1000)
}

/// A label that dominates `b` by construction: earlier clocks, every logged
/// time pulled back to somewhere in `0 ..= max(t, horizon)`, and possibly
/// extra serviced edges.
pub fn improve(b: &Label, inst: &Instance, knobs: &[u64]) -> Label {
    let mut a = b.clone();
    a.parent = None;
    a.action = None;
    a.convoy_time = shrink(b.convoy_time, knobs[0] % 1001);
    a.service_time = shrink(b.service_time, knobs[1] % 1001);
    let horizon = a.horizon();
    let mut log: ServiceLog = b
        .log
        .iter()
        .enumerate()
        .map(|(i, (e, t))| (e, shrink(t.max(horizon), knobs[(2 + i) % knobs.len()] % 1001)))
        .collect();
    for (i, &e) in inst.impeded_edges().iter().enumerate() {
        let k = knobs[(i + 7) % knobs.len()];
        if !log.contains(e) && k.is_multiple_of(3) {
            log.record(e, Cost::units(k % 120));
        }
    }
    a.log = log;
    a
}

pub fn walk_input() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<usize>(), 0..10)
}

pub fn knob_input() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), 12)
}

pub fn check_extension_monotone(inst: &Instance, choices: &[usize]) -> Result<(), TestCaseError> {
    let label = random_walk(inst, choices);
    if label.convoy_pos == inst.destination() {
        return Ok(());
    }
    for mv in enumerate_extensions(&label, inst).unwrap() {
        let child = ref_extend(&label, mv, inst).unwrap();
        prop_assert!(child.convoy_time >= label.convoy_time);
        prop_assert!(child.service_time >= label.service_time);
        prop_assert!(child.total_cost >= label.total_cost);
        let spent = (child.convoy_time.millis() - label.convoy_time.millis())
            + (child.service_time.millis() - label.service_time.millis());
        prop_assert_eq!(child.total_cost.millis() - label.total_cost.millis(), spent);
        prop_assert!(child.log.covers(&label.log));
        prop_assert!(child.log.len() >= label.log.len());
        prop_assert!(!label.sv_terminated || child.sv_terminated);
    }
    Ok(())
}

pub fn check_dominance_preserved(inst: &Instance, choices: &[usize], knobs: &[u64]) -> Result<(), TestCaseError> {
    let b = random_walk(inst, choices);
    if b.convoy_pos == inst.destination() {
        return Ok(());
    }
    let a = Arc::new(improve(&b, inst, knobs));
    prop_assert!(dominates(&a, &b).unwrap());
    let a_moves = enumerate_extensions(&a, inst).unwrap();
    for mv in enumerate_extensions(&b, inst).unwrap() {
        if !a_moves.contains(&mv) {
            // only a wait can be missing: `a` has nothing left to wait for here
            prop_assert_eq!(mv.convoy, Step::Stay);
            continue;
        }
        let ca = ref_extend(&a, mv, inst).unwrap();
        let cb = ref_extend(&b, mv, inst).unwrap();
        prop_assert!(dominates(&ca, &cb).unwrap(), "{} breaks dominance", mv);
    }
    Ok(())
}

pub fn check_priority_chain(inst: &Instance) -> Result<(), TestCaseError> {
    let h = all_targets_shortest(inst, inst.destination(), WeightSelector::ConvoyUnimpededEverywhere).unwrap();
    let outcome = search(inst, Algorithm::GplaStar, &SolverOptions::default()).unwrap();
    let f = |l: &Label| l.total_cost.checked_add(h[l.convoy_pos]).unwrap();
    for pair in outcome.label.chain().windows(2) {
        prop_assert!(f(&pair[1]) >= f(&pair[0]));
    }
    Ok(())
}

pub fn check_bounds(inst: &Instance) -> Result<(), TestCaseError> {
    let outcome = search(inst, Algorithm::GplaStar, &SolverOptions::default()).unwrap();
    let lb = compute_lower_bound(inst).unwrap();
    let ub = compute_upper_bound(inst).unwrap();
    prop_assert!(lb <= outcome.label.total_cost, "{} < {}", outcome.label.total_cost, lb);
    prop_assert!(outcome.label.total_cost <= ub, "{} > {}", outcome.label.total_cost, ub);
    Ok(())
}
