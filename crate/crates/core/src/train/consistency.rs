use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dp::{derive_seed, rollout_estimate_for, Comparator, LearnedComparator};
use crate::graph::Graph;
use crate::nn::{Params, Scalar};
use crate::solvers::Problem;

/// Fraction of pairs on which the comparator agrees with `estimate`:
/// `cmp(G, G') = 0` exactly when `G` is estimated at least as good as `G'`.
/// An empty pair list counts as fully consistent.
pub fn consistency_with<'a, C, E, I>(
    cmp: &C,
    pairs: I,
    problem: Problem,
    mut estimate: E,
    seed: u64,
) -> f64
where
    C: Comparator + ?Sized,
    E: FnMut(&Graph) -> usize,
    I: IntoIterator<Item = (&'a Graph, &'a Graph)>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut agree, mut total) = (0usize, 0usize);
    for (g, g2) in pairs {
        let says_second = cmp.compare(g, g2, &mut rng);
        let second_better = problem.better(estimate(g2), estimate(g));
        agree += usize::from(says_second == second_better);
        total += 1;
    }
    if total == 0 {
        1.0
    } else {
        agree as f64 / total as f64
    }
}

/// Consistency of the learned comparator against its own `m`-roll-out
/// estimates under the same parameters.
pub fn measure_consistency<'a, T, I>(
    params: &Params<T>,
    pairs: I,
    problem: Problem,
    m: usize,
    seed: u64,
) -> f64
where
    T: Scalar,
    I: IntoIterator<Item = (&'a Graph, &'a Graph)>,
{
    let cmp = LearnedComparator::new(params);
    let mut calls = 0u64;
    let estimate = |g: &Graph| {
        calls += 1;
        rollout_estimate_for(problem, g, &cmp, m, derive_seed(seed, calls))
    };
    consistency_with(&cmp, pairs, problem, estimate, seed)
}
