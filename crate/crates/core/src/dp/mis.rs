use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Comparator, Step, Trajectory};
use crate::graph::{Graph, VertexSet};

/// Runs the comparator-induced recursion for maximum independent set.
///
/// While edges remain: pick `v` uniformly among non-isolated vertices, form
/// `G0 = G \ {v}` and `G1 = G \ N(v)`, and continue with `G1` when the
/// comparator prefers it, `G0` otherwise. The surviving edgeless graph is the
/// answer, reported in the original ids.
pub fn solve_mis<C: Comparator + ?Sized>(g: &Graph, cmp: &C, seed: u64) -> (VertexSet, Trajectory) {
    let mut steps = Vec::new();
    let result = run(g, cmp, seed, Some(&mut steps));
    (result.clone(), Trajectory { steps, result })
}

/// [`solve_mis`] without recording the trajectory.
pub fn solve_mis_set<C: Comparator + ?Sized>(g: &Graph, cmp: &C, seed: u64) -> VertexSet {
    run(g, cmp, seed, None)
}

fn run<C: Comparator + ?Sized>(
    g: &Graph,
    cmp: &C,
    seed: u64,
    mut record: Option<&mut Vec<Step>>,
) -> VertexSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = g.clone();
    let mut origin: Vec<usize> = (0..g.n()).collect();
    let mut candidates = Vec::with_capacity(g.n());
    while current.m() > 0 {
        candidates.clear();
        candidates.extend((0..current.n()).filter(|&v| current.degree(v) > 0));
        let v = candidates[rng.gen_range(0..candidates.len())];
        let (g0, map0) = current.remove_vertex(v).expect("v is a vertex of current");
        let (g1, map1) = current
            .remove_neighbors(v)
            .expect("v is a vertex of current");
        let take1 = cmp.compare(&g0, &g1, &mut rng);
        origin = if take1 { map1 } else { map0 }.pull_back(&origin);
        let next = match record.as_deref_mut() {
            Some(steps) => {
                let next = if take1 { g1.clone() } else { g0.clone() };
                steps.push(Step {
                    graph: std::mem::take(&mut current),
                    vertex: v,
                    branch0: g0,
                    branch1: g1,
                    took_branch1: take1,
                });
                next
            }
            None => {
                if take1 {
                    g1
                } else {
                    g0
                }
            }
        };
        current = next;
    }
    VertexSet::independent(origin)
}
