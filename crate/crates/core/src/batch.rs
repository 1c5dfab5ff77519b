// SPDX-License-Identifier: Apache-2.0

//! Independent solves of many instances.
//!
//! With the `parallel` feature (on by default) the instances are spread over
//! the rayon thread pool; every solve is still single-threaded, so results
//! are identical to [`solve_batch_sequential`] under a deterministic clock.

use crate::model::MipInstance;
use crate::reopt::HintSet;
use crate::solver::{solve, SolveOutcome, SolverConfig};

pub fn solve_batch_sequential(
    instances: &[MipInstance],
    cfg: &SolverConfig,
    time_limit: f64,
) -> Vec<SolveOutcome> {
    instances
        .iter()
        .map(|inst| solve(inst, cfg, time_limit, &HintSet::default(), None))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn solve_batch(
    instances: &[MipInstance],
    cfg: &SolverConfig,
    time_limit: f64,
) -> Vec<SolveOutcome> {
    use rayon::prelude::*;
    instances
        .par_iter()
        .map(|inst| solve(inst, cfg, time_limit, &HintSet::default(), None))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn solve_batch(
    instances: &[MipInstance],
    cfg: &SolverConfig,
    time_limit: f64,
) -> Vec<SolveOutcome> {
    solve_batch_sequential(instances, cfg, time_limit)
}

/// Applies `f` to every item, in parallel when the feature is on. Output
/// order matches input order.
pub fn map_batch<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
