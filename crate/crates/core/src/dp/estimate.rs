use rayon::prelude::*;

use super::{derive_seed, solve_mis_set, solve_mvc_set, Comparator};
use crate::graph::{Graph, VertexSet};
use crate::solvers::{greedy_mis, greedy_mvc, Problem};

/// Best of `m` independent roll-outs of the recursion on `g`.
///
/// Roll-out `i` uses seed `derive_seed(seed, i)`, so the answer does not
/// depend on scheduling. Returns `None` when `m == 0`.
pub fn best_of_rollouts<C: Comparator + ?Sized>(
    problem: Problem,
    g: &Graph,
    cmp: &C,
    m: usize,
    seed: u64,
) -> Option<VertexSet> {
    let runs: Vec<VertexSet> = (0..m as u64)
        .into_par_iter()
        .map(|i| match problem {
            Problem::Mis => solve_mis_set(g, cmp, derive_seed(seed, i)),
            Problem::Mvc => solve_mvc_set(g, cmp, derive_seed(seed, i)),
        })
        .collect();
    // first best wins, in index order
    runs.into_iter().reduce(|best, s| {
        if problem.better(s.len(), best.len()) {
            s
        } else {
            best
        }
    })
}

/// Roll-out estimate of the optimum size: max (MIS) or min (MVC) over `m` runs.
///
/// With `m == 0` the MIS estimate is 0 and the MVC estimate is `n`, the
/// trivial bounds.
pub fn rollout_estimate_for<C: Comparator + ?Sized>(
    problem: Problem,
    g: &Graph,
    cmp: &C,
    m: usize,
    seed: u64,
) -> usize {
    match best_of_rollouts(problem, g, cmp, m, seed) {
        Some(s) => s.len(),
        None => match problem {
            Problem::Mis => 0,
            Problem::Mvc => g.n(),
        },
    }
}

/// Roll-out estimate combined with the greedy baseline.
pub fn mixed_estimate_for<C: Comparator + ?Sized>(
    problem: Problem,
    g: &Graph,
    cmp: &C,
    m: usize,
    seed: u64,
) -> usize {
    let greedy = match problem {
        Problem::Mis => greedy_mis(g).len(),
        Problem::Mvc => greedy_mvc(g).len(),
    };
    problem.best_of(rollout_estimate_for(problem, g, cmp, m, seed), greedy)
}

/// [`rollout_estimate_for`] for MIS.
pub fn rollout_estimate<C: Comparator + ?Sized>(g: &Graph, cmp: &C, m: usize, seed: u64) -> usize {
    rollout_estimate_for(Problem::Mis, g, cmp, m, seed)
}

/// [`mixed_estimate_for`] for MIS.
pub fn mixed_estimate<C: Comparator + ?Sized>(g: &Graph, cmp: &C, m: usize, seed: u64) -> usize {
    mixed_estimate_for(Problem::Mis, g, cmp, m, seed)
}
