use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Comparator, DpError, Step, Trajectory};
use crate::graph::{Graph, VertexSet};

/// One branch of the vertex-cover recursion.
///
/// `parent_of[i]` is the vertex of the parent instance that vertex `i`
/// stands for; a copy vertex maps to the vertex it shadows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvcBranch {
    pub graph: Graph,
    pub parent_of: Vec<usize>,
    pub is_copy: Vec<bool>,
}

/// Builds the two branch instances for branch vertex `v`.
///
/// * `G0` ("all of `N(v)` in the cover"): drop `v` and every edge touching
///   `N(v)`, then hang a fresh copy `u'` off each neighbour `u`.
/// * `G1` ("`v` in the cover"): drop the edges at `v` and hang a fresh copy
///   `v'` off `v`.
///
/// The pendant edge `(x, x')` forces exactly one of the pair into any
/// minimum cover, which stands for `x` being in the cover.
pub fn build_mvc_gadgets(g: &Graph, v: usize) -> Result<(MvcBranch, MvcBranch), DpError> {
    build_gadgets(g, v, &vec![false; g.n()])
}

fn build_gadgets(g: &Graph, v: usize, is_copy: &[bool]) -> Result<(MvcBranch, MvcBranch), DpError> {
    g.check_vertex(v)?;
    let nbrs = g.neighbors(v);
    if nbrs.is_empty() {
        return Err(DpError::IsolatedVertex(v));
    }
    let n = g.n();
    let mut in_nbrs = vec![false; n];
    for &u in nbrs {
        in_nbrs[u] = true;
    }

    // G0
    let mut new_id = vec![usize::MAX; n];
    let mut parent_of: Vec<usize> = Vec::with_capacity(n - 1 + nbrs.len());
    for w in (0..n).filter(|&w| w != v) {
        new_id[w] = parent_of.len();
        parent_of.push(w);
    }
    let base = parent_of.len();
    let mut lists: Vec<Vec<usize>> = parent_of
        .iter()
        .map(|&w| {
            if in_nbrs[w] {
                Vec::new()
            } else {
                g.neighbors(w)
                    .iter()
                    .filter(|&&x| x != v && !in_nbrs[x])
                    .map(|&x| new_id[x])
                    .collect()
            }
        })
        .collect();
    let mut copy0: Vec<bool> = parent_of.iter().map(|&w| is_copy[w]).collect();
    for (k, &u) in nbrs.iter().enumerate() {
        let copy = base + k;
        lists[new_id[u]].push(copy);
        lists.push(vec![new_id[u]]);
        parent_of.push(u);
        copy0.push(true);
    }
    let g0 = MvcBranch {
        graph: Graph::from_symmetric_lists(lists),
        parent_of,
        is_copy: copy0,
    };

    // G1
    let mut lists = g.clone().into_lists();
    for &u in nbrs {
        lists[u].retain(|&x| x != v);
    }
    lists[v] = vec![n];
    lists.push(vec![v]);
    let mut copy1 = is_copy.to_vec();
    copy1.push(true);
    let g1 = MvcBranch {
        graph: Graph::from_symmetric_lists(lists),
        parent_of: (0..n).chain([v]).collect(),
        is_copy: copy1,
    };
    Ok((g0, g1))
}

/// Runs the comparator-induced recursion for minimum vertex cover.
///
/// Base case: every degree is at most one, and one endpoint of each
/// remaining edge joins the cover (the non-copy endpoint when there is one,
/// otherwise the smaller id). Otherwise pick `v` uniformly among vertices of
/// degree at least one, build the gadgets and follow `G1` when the comparator
/// prefers it. The cover is returned in the original ids.
pub fn solve_mvc<C: Comparator + ?Sized>(g: &Graph, cmp: &C, seed: u64) -> (VertexSet, Trajectory) {
    let mut steps = Vec::new();
    let result = run(g, cmp, seed, Some(&mut steps));
    (result.clone(), Trajectory { steps, result })
}

/// [`solve_mvc`] without recording the trajectory.
pub fn solve_mvc_set<C: Comparator + ?Sized>(g: &Graph, cmp: &C, seed: u64) -> VertexSet {
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
    let mut is_copy = vec![false; g.n()];
    let mut candidates = Vec::new();
    while current.max_degree() > 1 {
        candidates.clear();
        candidates.extend((0..current.n()).filter(|&v| current.degree(v) > 0));
        let v = candidates[rng.gen_range(0..candidates.len())];
        let (b0, b1) = build_gadgets(&current, v, &is_copy).expect("v has a neighbour");
        let take1 = cmp.compare(&b0.graph, &b1.graph, &mut rng);
        let chosen = if take1 { b1.clone() } else { b0.clone() };
        if let Some(steps) = record.as_deref_mut() {
            steps.push(Step {
                graph: std::mem::take(&mut current),
                vertex: v,
                branch0: b0.graph,
                branch1: b1.graph,
                took_branch1: take1,
            });
        }
        origin = chosen.parent_of.iter().map(|&p| origin[p]).collect();
        is_copy = chosen.is_copy;
        current = chosen.graph;
    }
    let cover = current.edges().map(|(a, b)| {
        let pick = if is_copy[a] && !is_copy[b] { b } else { a };
        origin[pick]
    });
    VertexSet::cover(cover)
}
