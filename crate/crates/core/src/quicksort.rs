//! First-element-pivot quicksort with inward scans, instrumented.
//!
//! Keys equal to the pivot are swept left by the down-scan, so runs of equal
//! keys degenerate into one-sided partitions and quadratic work. That
//! behaviour is the object of study and is preserved exactly.
//!
//! Counting rules:
//! - one comparison per evaluation of `keys[down] <= pivot` or
//!   `keys[up] > pivot` (the `down < ub` guard is not counted);
//! - one swap per exchange inside the scan loop, plus one per final pivot
//!   placement;
//! - the scan loop body runs at least once per partition call, so a
//!   one-element range costs exactly two comparisons.

use std::time::Instant;

/// Measurements of one sort execution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InstrumentedRun {
    pub comparisons: u64,
    pub swaps: u64,
    /// Seconds spent inside the sort call; zero for untimed runs.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortOutcome<T> {
    pub sorted_keys: Vec<T>,
    pub run: InstrumentedRun,
}

/// Partitions `keys[lb..=ub]` around `keys[lb]` and returns the pivot's
/// final index.
///
/// # Panics
///
/// If `lb > ub` or `ub` is out of bounds.
pub fn partition<T: Copy + PartialOrd>(
    keys: &mut [T],
    lb: usize,
    ub: usize,
    run: &mut InstrumentedRun,
) -> usize {
    assert!(
        lb <= ub && ub < keys.len(),
        "partition range {lb}..={ub} out of bounds"
    );
    let pivot = keys[lb];
    let mut down = lb;
    let mut up = ub;
    loop {
        loop {
            run.comparisons += 1;
            if keys[down] <= pivot && down < ub {
                down += 1;
            } else {
                break;
            }
        }
        // keys[lb] == pivot stops this scan at lb at the latest
        loop {
            run.comparisons += 1;
            if keys[up] > pivot {
                up -= 1;
            } else {
                break;
            }
        }
        if down < up {
            keys.swap(down, up);
            run.swaps += 1;
        } else {
            break;
        }
    }
    keys[lb] = keys[up];
    keys[up] = pivot;
    run.swaps += 1;
    up
}

/// Sorts in place and returns the comparison and swap counts.
///
/// Ranges are processed from an explicit stack in the same order as the
/// textbook recursion (left part before right part), so counts match the
/// recursive formulation while stack use stays on the heap. Tied inputs
/// drive the partition tree to depth proportional to `n`.
pub fn sort_counted<T: Copy + PartialOrd>(keys: &mut [T]) -> InstrumentedRun {
    let mut run = InstrumentedRun::default();
    if keys.is_empty() {
        return run;
    }
    let mut pending = vec![(0usize, keys.len() - 1)];
    while let Some((lb, ub)) = pending.pop() {
        let j = partition(keys, lb, ub, &mut run);
        if j < ub {
            pending.push((j + 1, ub));
        }
        if j > lb {
            pending.push((lb, j - 1));
        }
    }
    run
}

pub fn quicksort<T: Copy + PartialOrd>(mut keys: Vec<T>) -> SortOutcome<T> {
    let run = sort_counted(&mut keys);
    SortOutcome {
        sorted_keys: keys,
        run,
    }
}

/// Monotonic time source in seconds.
pub trait Clock {
    fn now(&self) -> f64;

    /// Smallest observable tick, in seconds.
    fn resolution(&self) -> f64;
}

/// `Instant`-backed clock.
#[derive(Debug, Clone)]
pub struct MonotonicClock {
    origin: Instant,
    resolution: f64,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
            resolution: estimate_resolution(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }

    fn resolution(&self) -> f64 {
        self.resolution
    }
}

/// Smallest nonzero gap between consecutive `Instant` readings over a few
/// probes.
fn estimate_resolution() -> f64 {
    (0..16)
        .map(|_| {
            let start = Instant::now();
            loop {
                let gap = start.elapsed();
                if !gap.is_zero() {
                    break gap.as_secs_f64();
                }
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Sorts `keys`, timing only the sort call.
pub fn timed_sort<T: Copy + PartialOrd, C: Clock + ?Sized>(
    mut keys: Vec<T>,
    clock: &C,
) -> SortOutcome<T> {
    let start = clock.now();
    let mut run = sort_counted(&mut keys);
    let end = clock.now();
    run.elapsed = (end - start).max(0.0);
    SortOutcome {
        sorted_keys: keys,
        run,
    }
}

#[cfg(test)]
mod tests {
    use std::cell::Cell;

    use super::*;

    #[test]
    fn partition_three_keys() {
        let mut keys = [3, 1, 2];
        let mut run = InstrumentedRun::default();
        let pj = partition(&mut keys, 0, 2, &mut run);
        assert_eq!(keys, [2, 1, 3]);
        assert_eq!(pj, 2);
        // down-scan: 3 evaluations, up-scan: 1
        assert_eq!(run.comparisons, 4);
        assert_eq!(run.swaps, 1);
    }

    #[test]
    fn partition_single_element() {
        let mut keys = [7];
        let mut run = InstrumentedRun::default();
        assert_eq!(partition(&mut keys, 0, 0, &mut run), 0);
        assert_eq!(keys, [7]);
        assert_eq!(run.comparisons, 2);
    }

    #[test]
    fn partition_all_equal_parks_pivot_at_top() {
        let mut keys = [5, 5, 5];
        let mut run = InstrumentedRun::default();
        assert_eq!(partition(&mut keys, 0, 2, &mut run), 2);
        assert_eq!(run.comparisons, 4);
    }

    #[test]
    fn partition_respects_subrange() {
        let mut keys = [9, 4, 8, 1, 6, 0];
        let mut run = InstrumentedRun::default();
        let pj = partition(&mut keys, 1, 4, &mut run);
        assert_eq!(keys[0], 9);
        assert_eq!(keys[5], 0);
        assert!(keys[1..pj].iter().all(|&k| k <= keys[pj]));
        assert!(keys[pj + 1..=4].iter().all(|&k| k > keys[pj]));
    }

    #[test]
    #[should_panic]
    fn partition_rejects_inverted_range() {
        partition(&mut [1, 2], 1, 0, &mut InstrumentedRun::default());
    }

    #[test]
    fn small_inputs() {
        let empty = quicksort(Vec::<i64>::new());
        assert!(empty.sorted_keys.is_empty());
        assert_eq!(empty.run.comparisons, 0);
        assert_eq!(quicksort(vec![2, 1]).sorted_keys, [1, 2]);
        assert_eq!(
            quicksort(vec![0.5, -1.0, 0.5, 3.0]).sorted_keys,
            [-1.0, 0.5, 0.5, 3.0]
        );
    }

    #[test]
    fn all_equal_ten() {
        assert_eq!(quicksort(vec![4u8; 10]).run.comparisons, 65);
    }

    #[test]
    fn counts_are_deterministic() {
        let keys: Vec<i64> = (0..500).map(|i| (i * 7919) % 37).collect();
        assert_eq!(quicksort(keys.clone()).run, quicksort(keys).run);
    }

    struct StepClock(Cell<f64>);

    impl Clock for StepClock {
        fn now(&self) -> f64 {
            let t = self.0.get();
            self.0.set(t + 0.25);
            t
        }
        fn resolution(&self) -> f64 {
            0.25
        }
    }

    #[test]
    fn timing_brackets_the_sort_only() {
        let clock = StepClock(Cell::new(1.0));
        let out = timed_sort(vec![3, 2, 1], &clock);
        assert_eq!(out.run.elapsed, 0.25);
        assert_eq!(out.sorted_keys, [1, 2, 3]);
    }

    #[test]
    fn monotonic_clock_smoke() {
        let clock = MonotonicClock::new();
        assert!(clock.resolution() > 0.0 && clock.resolution() < 0.1);
        let out = timed_sort(Vec::<f64>::new(), &clock);
        assert!(out.run.elapsed >= 0.0);
        assert_eq!(out.run.comparisons, 0);
    }
}
