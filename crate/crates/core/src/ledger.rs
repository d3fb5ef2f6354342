//! Per-thread instrumentation: a multiplication counter for the evaluation
//! kernels and an accounting of how many numbers are held in tracked storage.
//!
//! Counters are thread-local so that concurrently running tests do not see
//! each other's work. Kernels add to the counter in bulk (one addition per
//! inner loop) so the instrumentation costs nothing measurable.
//!
//! Storage is tracked by embedding a [`Tracked`] token in every container
//! that owns kernel data ([`DenseMatrix`](crate::DenseMatrix) and
//! [`SparsityPattern`](crate::SparsityPattern)). Index entries count as one
//! number each.

use std::cell::Cell;

thread_local! {
    static MULTIPLICATIONS: Cell<u64> = const { Cell::new(0) };
    static LIVE: Cell<usize> = const { Cell::new(0) };
    static PEAK: Cell<usize> = const { Cell::new(0) };
}

/// Multiplications performed by evaluation kernels on this thread since the
/// last [`reset_multiplications`].
pub fn multiplications() -> u64 {
    MULTIPLICATIONS.with(Cell::get)
}

pub fn reset_multiplications() {
    MULTIPLICATIONS.with(|m| m.set(0));
}

pub(crate) fn count_multiplications(count: u64) {
    MULTIPLICATIONS.with(|m| m.set(m.get() + count));
}

/// Numbers currently held in tracked storage on this thread.
pub fn live_numbers() -> usize {
    LIVE.with(Cell::get)
}

/// High-water mark of [`live_numbers`] since the last [`reset_peak`].
pub fn peak_numbers() -> usize {
    PEAK.with(Cell::get)
}

/// Lowers the high-water mark to the current live count.
pub fn reset_peak() {
    let live = live_numbers();
    PEAK.with(|p| p.set(live));
}

fn acquire(count: usize) {
    let live = LIVE.with(|l| {
        let v = l.get() + count;
        l.set(v);
        v
    });
    PEAK.with(|p| {
        if live > p.get() {
            p.set(live);
        }
    });
}

fn release(count: usize) {
    LIVE.with(|l| l.set(l.get().saturating_sub(count)));
}

/// Measures what a block of work costs: multiplications performed and the
/// peak amount of storage held above what was live when the probe started.
///
/// Probes do not nest: starting a probe resets the thread's high-water mark.
#[derive(Debug)]
pub struct Probe {
    baseline_live: usize,
    baseline_mults: u64,
}

impl Probe {
    pub fn start() -> Self {
        reset_peak();
        Probe {
            baseline_live: live_numbers(),
            baseline_mults: multiplications(),
        }
    }

    pub fn multiplications(&self) -> u64 {
        multiplications() - self.baseline_mults
    }

    /// Peak numbers held above the baseline since the probe started.
    pub fn peak_numbers(&self) -> usize {
        peak_numbers().saturating_sub(self.baseline_live)
    }
}

/// Accounting token owned by a container. Releases its count on drop and
/// re-acquires on clone.
#[derive(Debug)]
pub(crate) struct Tracked(usize);

impl Tracked {
    pub(crate) fn new(count: usize) -> Self {
        acquire(count);
        Tracked(count)
    }
}

impl Clone for Tracked {
    fn clone(&self) -> Self {
        Tracked::new(self.0)
    }
}

impl Drop for Tracked {
    fn drop(&mut self) {
        release(self.0);
    }
}

// Accounting metadata never affects equality of the owning container.
impl PartialEq for Tracked {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
