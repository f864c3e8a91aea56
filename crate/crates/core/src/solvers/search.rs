use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use crate::cost::Cost;
use crate::instance::Instance;
use crate::labeling::{dominates_unchecked, enumerate_extensions, ref_extend, DominanceRule, Label, LabelKey};
use crate::paths::{all_targets_shortest, WeightSelector};

use super::{compute_upper_bound, Algorithm, Limit, SolveError, SolverOptions, SolverStats};

const CLOCK_CHECK_INTERVAL: u64 = 128;

/// The label a search settled on, with its counters.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub label: Arc<Label>,
    pub stats: SolverStats,
}

/// Non-dominated labels per bucket. Evicted labels stay in `labels` so
/// open-list entries can be skipped lazily.
struct Store {
    labels: Vec<Arc<Label>>,
    alive: Vec<bool>,
    buckets: HashMap<LabelKey, Vec<usize>>,
    rule: DominanceRule,
}

impl Store {
    fn new(rule: DominanceRule) -> Self {
        Store { labels: Vec::new(), alive: Vec::new(), buckets: HashMap::new(), rule }
    }

    fn insert(&mut self, label: Label, stats: &mut SolverStats) -> Option<usize> {
        let Store { labels, alive, buckets, rule } = self;
        let bucket = buckets.entry(label.key()).or_default();
        if bucket.iter().any(|&i| dominates_unchecked(&labels[i], &label, *rule)) {
            stats.dominance_pruned += 1;
            return None;
        }
        bucket.retain(|&i| {
            let keep = !dominates_unchecked(&label, &labels[i], *rule);
            if !keep {
                alive[i] = false;
                stats.dominance_evicted += 1;
            }
            keep
        });
        let idx = labels.len();
        bucket.push(idx);
        labels.push(Arc::new(label));
        alive.push(true);
        Some(idx)
    }
}

#[derive(PartialEq, Eq)]
struct HeapEntry {
    f: Cost,
    h: Cost,
    seq: usize,
}

// BinaryHeap is a max-heap: the greatest entry has the least f, then the
// least h, then the most recent insertion.
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.cmp(&self.f).then_with(|| other.h.cmp(&self.h)).then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

enum Open {
    Stack(Vec<usize>),
    Heap(BinaryHeap<HeapEntry>),
}

impl Open {
    fn push(&mut self, idx: usize, f: Cost, h: Cost) {
        match self {
            Open::Stack(s) => s.push(idx),
            Open::Heap(heap) => heap.push(HeapEntry { f, h, seq: idx }),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Open::Stack(s) => s.pop(),
            Open::Heap(heap) => heap.pop().map(|e| e.seq),
        }
    }

    fn len(&self) -> usize {
        match self {
            Open::Stack(s) => s.len(),
            Open::Heap(heap) => heap.len(),
        }
    }
}

/// Runs one label-setting search and returns the optimal destination label.
pub fn search(inst: &Instance, algorithm: Algorithm, options: &SolverOptions) -> Result<SearchOutcome, SolveError> {
    let started = Instant::now();
    let budget = options.budget;
    let dest = inst.destination();
    let best_first = algorithm == Algorithm::GplaStar;

    let h = all_targets_shortest(inst, dest, WeightSelector::ConvoyUnimpededEverywhere)?;
    let upper_bound = if best_first { Some(compute_upper_bound(inst)?) } else { None };

    let mut stats = SolverStats::default();
    let mut store = Store::new(options.dominance);
    let mut open = if best_first { Open::Heap(BinaryHeap::new()) } else { Open::Stack(Vec::new()) };

    let root = Label::root(inst);
    let root_h = h[root.convoy_pos];
    let root_idx = store.insert(root, &mut stats).expect("empty store accepts the root");
    open.push(root_idx, root_h, root_h);
    stats.peak_open = 1;

    let mut pops = 0u64;
    while let Some(idx) = open.pop() {
        pops += 1;
        if pops.is_multiple_of(CLOCK_CHECK_INTERVAL) && started.elapsed() > budget.timeout {
            stats.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
            return Err(SolveError::Timeout { limit: Limit::WallClock, stats });
        }
        if !store.alive[idx] {
            continue;
        }
        let label = Arc::clone(&store.labels[idx]);
        if label.convoy_pos == dest {
            if best_first {
                stats.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
                return Ok(SearchOutcome { label, stats });
            }
            continue;
        }
        if budget.max_extended.is_some_and(|cap| stats.extended >= cap) {
            stats.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
            return Err(SolveError::Timeout { limit: Limit::ExtendedLabels, stats });
        }
        stats.extended += 1;

        let parent_f = label.total_cost.checked_add(h[label.convoy_pos]);
        let mut children = Vec::new();
        for mv in enumerate_extensions(&label, inst)? {
            let child = ref_extend(&label, mv, inst)?;
            stats.generated += 1;
            let child_h = h[child.convoy_pos];
            let f = child.total_cost.checked_add(child_h).ok_or(crate::labeling::LabelError::Overflow)?;
            debug_assert!(parent_f.is_some_and(|pf| pf <= f), "f-cost decreased along an extension");
            if upper_bound.is_some_and(|ub| f > ub) {
                stats.cost_filtered += 1;
                continue;
            }
            children.push((f, child_h, child));
        }
        for (f, child_h, child) in children {
            if let Some(child_idx) = store.insert(child, &mut stats) {
                open.push(child_idx, f, child_h);
            }
        }
        stats.peak_open = stats.peak_open.max(open.len() as u64);
    }

    stats.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    if best_first {
        return Err(SolveError::Internal("open list exhausted before reaching the destination".into()));
    }
    let best = store
        .labels
        .iter()
        .zip(&store.alive)
        .filter(|(l, &alive)| alive && l.convoy_pos == dest)
        .map(|(l, _)| l)
        .min_by_key(|l| l.total_cost)
        .cloned()
        .ok_or_else(|| SolveError::Internal("no destination label found".into()))?;
    Ok(SearchOutcome { label: best, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_order() {
        let mut heap = BinaryHeap::new();
        let c = Cost::units;
        heap.push(HeapEntry { f: c(5), h: c(3), seq: 0 });
        heap.push(HeapEntry { f: c(5), h: c(1), seq: 1 });
        heap.push(HeapEntry { f: c(5), h: c(1), seq: 2 });
        heap.push(HeapEntry { f: c(4), h: c(9), seq: 3 });
        let order: Vec<_> = std::iter::from_fn(|| heap.pop().map(|e| e.seq)).collect();
        assert_eq!(order, vec![3, 2, 1, 0]);
    }
}
