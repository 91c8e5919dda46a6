//! Pointwise evaluation over frequency grids.
//!
//! With the `parallel` feature (on by default) grid maps are spread over the
//! rayon thread pool; without it every map runs on the calling thread. Both
//! paths produce identical, order-preserving output since every point is a
//! pure function of its frequency.

/// How a grid map is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `op` over `points`, preserving order.
pub fn map<T, F>(points: &[f64], exec: Execution, op: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => points.iter().map(|&x| op(x)).collect(),
        Execution::Parallel => map_parallel(points, op),
    }
}

#[cfg(feature = "parallel")]
fn map_parallel<T, F>(points: &[f64], op: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    points.par_iter().map(|&x| op(x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_parallel<T, F>(points: &[f64], op: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    points.iter().map(|&x| op(x)).collect()
}
