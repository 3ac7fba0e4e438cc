//! Deterministic block-parallel summation.
//!
//! Work is split into a fixed number of blocks regardless of how many worker
//! threads run; each block is summed in its own fixed order and block results
//! are combined by a pairwise reduction in block order. The total is therefore
//! bit-identical for any thread count. `CIRCLE_SOBOLEV_THREADS` caps the
//! number of workers.

use std::sync::atomic::{AtomicUsize, Ordering};

pub(crate) fn thread_cap() -> usize {
    match std::env::var("CIRCLE_SOBOLEV_THREADS") {
        Ok(s) => s.trim().parse().ok().filter(|&n| n >= 1).unwrap_or(1),
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    }
}

pub(crate) fn block_sum(blocks: usize, job: impl Fn(usize) -> f64 + Sync) -> f64 {
    block_sum_with(thread_cap(), blocks, job)
}

pub(crate) fn block_sum_with(
    workers: usize,
    blocks: usize,
    job: impl Fn(usize) -> f64 + Sync,
) -> f64 {
    let workers = workers.min(blocks).max(1);
    let mut partials = vec![0.0; blocks];
    if workers == 1 {
        for (i, slot) in partials.iter_mut().enumerate() {
            *slot = job(i);
        }
    } else {
        let next = AtomicUsize::new(0);
        let done: Vec<(usize, f64)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= blocks {
                                break;
                            }
                            local.push((i, job(i)));
                        }
                        local
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for (i, v) in done {
            partials[i] = v;
        }
    }
    pairwise_sum(&partials)
}

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_independent_of_worker_count() {
        let job = |i: usize| ((i * 2654435761) % 1000) as f64 * 1e-3 + (i as f64).sin();
        let one = block_sum_with(1, 64, job);
        for workers in [2, 3, 8] {
            let many = block_sum_with(workers, 64, job);
            assert_eq!(one.to_bits(), many.to_bits(), "workers = {workers}");
        }
    }

    #[test]
    fn pairwise_sum_handles_edges() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
    }
}
