//! Deterministic parallel execution of independent work items.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

/// Evaluates `f(0..n)` on up to `jobs` worker threads (0 = available cores)
/// and returns results in index order, so the output is independent of the
/// thread count and of scheduling.
pub fn parallel_map<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = if jobs == 0 {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    } else {
        jobs
    };
    let jobs = jobs.max(1).min(n.max(1));
    if n == 0 {
        return Vec::new();
    }
    if jobs == 1 {
        return (0..n).map(f).collect();
    }

    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..jobs {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                if tx.send((i, f(i))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        while let Ok((i, value)) = rx.recv() {
            slots[i] = Some(value);
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every index was computed"))
        .collect()
}
