//! Test-only reference: a line-by-line recursive transcription of the
//! partition-exchange sort, counting independently of the library.
#![allow(dead_code)]

use empo::rng::Rng;
use empo::{DistributionSpec, Keys};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub comparisons: u64,
    pub swaps: u64,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn partition<T: Copy + PartialOrd>(x: &mut [T], lb: isize, ub: isize, c: &mut Counts) -> isize {
    let a = x[lb as usize];
    let mut up = ub;
    let mut down = lb;
    let mut first = true;
    // the scan body runs once even for lb == ub
    while down < up || first {
        first = false;
        loop {
            c.comparisons += 1;
            if !(x[down as usize] <= a && down < ub) {
                break;
            }
            down += 1;
        }
        loop {
            c.comparisons += 1;
            if !(x[up as usize] > a) {
                break;
            }
            up -= 1;
        }
        if down < up {
            x.swap(down as usize, up as usize);
            c.swaps += 1;
        }
    }
    x[lb as usize] = x[up as usize];
    x[up as usize] = a;
    c.swaps += 1;
    up
}

fn recurse<T: Copy + PartialOrd>(x: &mut [T], lb: isize, ub: isize, c: &mut Counts) {
    if lb > ub {
        return;
    }
    let j = partition(x, lb, ub, c);
    recurse(x, lb, j - 1, c);
    recurse(x, j + 1, ub, c);
}

/// Recursive reference sort. Only for inputs whose partition tree fits the
/// test thread's stack.
pub fn literal_quicksort<T: Copy + PartialOrd>(x: &mut [T]) -> Counts {
    let mut c = Counts::default();
    recurse(x, 0, x.len() as isize - 1, &mut c);
    c
}

pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Keys {
    spec.sample(n, &mut Rng::new(seed)).unwrap().keys
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
