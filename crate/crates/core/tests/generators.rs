use std::collections::BTreeSet;

use aspp_core::instances::{
    generate_cuts, generate_grid, grid_edges, impeded_count, CostMode, GeneratorConfig, GeneratorError, ImpededMode,
    ServiceStart,
};
use aspp_core::{Cost, GridShape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(rows: usize, cols: usize, seed: u64, impeded: ImpededMode) -> GeneratorConfig {
    GeneratorConfig::new(rows, cols, seed, impeded, CostMode::Ranged)
}

#[test]
fn same_seed_same_instance() {
    for mode in [ImpededMode::Fraction(0.3), ImpededMode::Cuts(3)] {
        let a = generate_grid(&cfg(3, 15, 42, mode)).unwrap();
        let b = generate_grid(&cfg(3, 15, 42, mode)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_grid(&cfg(3, 15, 43, mode)).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }
}

#[test]
fn grid_layout() {
    let inst = generate_grid(&cfg(5, 10, 1, ImpededMode::Fraction(0.1))).unwrap();
    assert_eq!(inst.vertex_count(), 50);
    assert_eq!(inst.edge_count(), 85);
    assert_eq!(inst.convoy_start(), 0);
    let shape = GridShape { rows: 5, cols: 10 };
    assert_eq!(shape.coords(inst.destination()), (9, 4));
    let long = generate_grid(&cfg(3, 15, 1, ImpededMode::Cuts(1))).unwrap();
    assert_eq!(GridShape { rows: 3, cols: 15 }.coords(long.destination()), (14, 2));
}

#[test]
fn fraction_sets_exact_counts() {
    for (rows, cols) in [(3, 3), (4, 3), (4, 4), (6, 6)] {
        let m = grid_edges(GridShape { rows, cols }).len();
        for f in [0.1, 0.2, 0.3, 0.5] {
            for seed in 0..5 {
                let inst = generate_grid(&cfg(rows, cols, seed, ImpededMode::Fraction(f))).unwrap();
                assert_eq!(inst.impeded_edges().len(), impeded_count(f, m));
            }
        }
    }
}

#[test]
fn ranged_weights_stay_in_range() {
    for seed in 0..20 {
        let inst = generate_grid(&cfg(4, 4, seed, ImpededMode::Fraction(0.5))).unwrap();
        for e in inst.edges() {
            let w = e.weights;
            assert!((Cost::units(10)..=Cost::units(15)).contains(&w.convoy_unimpeded));
            assert_eq!(w.service_unimpeded, Cost::units(1));
            if e.impeded {
                assert!((Cost::units(40)..=Cost::units(50)).contains(&w.convoy_impeded));
                assert!((Cost::units(2)..=Cost::units(6)).contains(&w.service_impeded));
            } else {
                assert_eq!((w.convoy_impeded, w.service_impeded), (w.convoy_unimpeded, w.service_unimpeded));
            }
        }
    }
}

#[test]
fn every_cut_separates_start_from_destination() {
    let shape = GridShape { rows: 3, cols: 15 };
    for cuts in 1..=5 {
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = generate_cuts(shape, cuts, &mut rng).unwrap();
            assert!(set.len() >= shape.rows, "a cut crosses every row");
            let inst = generate_grid(&cfg(3, 15, seed, ImpededMode::Cuts(cuts))).unwrap();
            assert!(inst.impeded_set_separates(), "cuts={cuts} seed={seed}");
        }
    }
}

#[test]
fn more_cuts_impede_more_edges() {
    let mut means = Vec::new();
    for cuts in 1..=5 {
        let total: usize = (0..60)
            .map(|seed| generate_grid(&cfg(3, 15, seed, ImpededMode::Cuts(cuts))).unwrap().impeded_edges().len())
            .sum();
        means.push(total as f64 / 60.0);
    }
    assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
}

#[test]
fn rejects_bad_configs() {
    assert!(matches!(generate_grid(&cfg(3, 3, 0, ImpededMode::Cuts(3))), Err(GeneratorError::TooManyCuts { .. })));
    assert!(generate_grid(&cfg(3, 3, 0, ImpededMode::Fraction(0.0))).is_err());
    assert!(generate_grid(&cfg(1, 1, 0, ImpededMode::Fraction(0.5))).is_err());
    let mut c = cfg(3, 3, 0, ImpededMode::Fraction(0.5));
    c.service_start = ServiceStart::Vertex(9);
    assert!(generate_grid(&c).is_err());
}

#[test]
fn service_start_can_be_pinned() {
    let mut c = cfg(3, 5, 7, ImpededMode::Cuts(2));
    c.service_start = ServiceStart::Vertex(4);
    let pinned = generate_grid(&c).unwrap();
    let free = generate_grid(&cfg(3, 5, 7, ImpededMode::Cuts(2))).unwrap();
    assert_eq!(pinned.service_start(), 4);
    let ids = |i: &aspp_core::Instance| i.impeded_edges().iter().copied().collect::<BTreeSet<_>>();
    assert_eq!(ids(&pinned), ids(&free));
}
