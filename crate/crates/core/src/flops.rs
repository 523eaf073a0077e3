//! Per-thread multiply-add counter used to check the cost model of the
//! ellipsoid updates and of batch screening.

use std::cell::Cell;

thread_local! {
    static COUNT: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub(crate) fn add(n: usize) {
    COUNT.with(|c| c.set(c.get() + n as u64));
}

pub fn reset() {
    COUNT.with(|c| c.set(0));
}

pub fn get() -> u64 {
    COUNT.with(|c| c.get())
}

/// Runs `f` and returns its result with the number of multiply-adds it
/// performed on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = get();
    let out = f();
    (out, get() - before)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    add(a.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    add(x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
