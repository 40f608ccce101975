//! Comparator-driven recursive solvers.
//!
//! Both recursions branch on a random vertex `v` into two smaller instances
//! and let a [`Comparator`] decide which branch to follow. Whatever the
//! comparator answers, the result is feasible; an exact comparator makes it
//! optimal.

mod estimate;
mod mis;
mod mvc;
mod trajectory;

pub use estimate::{
    best_of_rollouts, mixed_estimate, mixed_estimate_for, rollout_estimate, rollout_estimate_for,
};
pub use mis::{solve_mis, solve_mis_set};
pub use mvc::{build_mvc_gadgets, solve_mvc, solve_mvc_set, MvcBranch};
pub use trajectory::{Step, Trajectory};

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::graph::Graph;
use crate::nn::{self, Params, Scalar};
use crate::solvers::{mis_size, mvc_size, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error("vertex {0} is isolated; the cover gadgets need d(v) >= 1")]
    IsolatedVertex(usize),
}

/// Decides which of two sibling instances to recurse into.
///
/// `compare(first, second)` returns `true` when `second` is judged the
/// better instance: larger maximum independent set, or smaller minimum
/// vertex cover. Ties must answer `false`.
pub trait Comparator: Sync {
    fn compare(&self, first: &Graph, second: &Graph, rng: &mut dyn RngCore) -> bool;
}

impl<C: Comparator + ?Sized> Comparator for &C {
    fn compare(&self, first: &Graph, second: &Graph, rng: &mut dyn RngCore) -> bool {
        (**self).compare(first, second, rng)
    }
}

/// The learned comparator `[M(first) < M(second)]`.
#[derive(Debug, Clone, Copy)]
pub struct LearnedComparator<'a, T> {
    pub params: &'a Params<T>,
}

impl<'a, T: Scalar> LearnedComparator<'a, T> {
    pub fn new(params: &'a Params<T>) -> Self {
        Self { params }
    }
}

impl<T: Scalar> Comparator for LearnedComparator<'_, T> {
    fn compare(&self, first: &Graph, second: &Graph, _rng: &mut dyn RngCore) -> bool {
        nn::compare(self.params, first, second)
    }
}

/// Compares exact optima. Panics if a graph exceeds the exact solver's limit.
#[derive(Debug, Clone, Copy)]
pub struct OracleComparator {
    pub problem: Problem,
}

impl OracleComparator {
    pub fn new(problem: Problem) -> Self {
        Self { problem }
    }
}

impl Comparator for OracleComparator {
    fn compare(&self, first: &Graph, second: &Graph, _rng: &mut dyn RngCore) -> bool {
        const MSG: &str = "oracle comparator used on a graph beyond the exact limit";
        match self.problem {
            Problem::Mis => mis_size(first).expect(MSG) < mis_size(second).expect(MSG),
            Problem::Mvc => mvc_size(first).expect(MSG) > mvc_size(second).expect(MSG),
        }
    }
}

/// Fair coin drawn from the solver's RNG stream.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomComparator;

impl Comparator for RandomComparator {
    fn compare(&self, _first: &Graph, _second: &Graph, rng: &mut dyn RngCore) -> bool {
        rng.gen_bool(0.5)
    }
}

/// Adapts a closure; handy for adversarial comparators in tests.
pub struct FnComparator<F>(pub F);

impl<F> Comparator for FnComparator<F>
where
    F: Fn(&Graph, &Graph) -> bool + Sync,
{
    fn compare(&self, first: &Graph, second: &Graph, _rng: &mut dyn RngCore) -> bool {
        (self.0)(first, second)
    }
}

/// Seed of the `index`-th derived stream (SplitMix64 finaliser over the pair).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
