//! Branch-and-bound maximum independent set.
//!
//! Pendant and isolated vertices are taken greedily (always safe for MIS),
//! the branch vertex is the one of maximum residual degree, and subtrees are
//! pruned with a greedy clique-cover upper bound.

use super::bitset::Bits;
use super::{greedy_mis, SolverError};
use crate::graph::{Graph, SetKind, VertexSet};

/// Largest graph the exact solvers accept without an explicit budget.
pub const EXACT_VERTEX_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOutcome {
    /// Proven optimal.
    Optimal(VertexSet),
    /// Budget ran out: `incumbent` is feasible, and no solution beats
    /// `bound` (an upper bound for MIS, a lower bound for MVC).
    BoundOnly { incumbent: VertexSet, bound: usize },
}

impl ExactOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, ExactOutcome::Optimal(_))
    }

    pub fn optimal(self) -> Option<VertexSet> {
        match self {
            ExactOutcome::Optimal(s) => Some(s),
            ExactOutcome::BoundOnly { .. } => None,
        }
    }

    pub fn incumbent(&self) -> &VertexSet {
        match self {
            ExactOutcome::Optimal(s) => s,
            ExactOutcome::BoundOnly { incumbent, .. } => incumbent,
        }
    }
}

struct Search<'a> {
    adj: &'a [Bits],
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl Search<'_> {
    fn run(&mut self, mut cand: Bits, current: &mut Vec<usize>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.exhausted = true;
            return;
        }
        let mark = current.len();

        // Degree <= 1 vertices belong to some maximum independent set.
        loop {
            let pick = cand.iter().find(|&v| self.adj[v].count_and(&cand) <= 1);
            let Some(v) = pick else { break };
            current.push(v);
            cand.remove(v);
            cand.and_not_assign(&self.adj[v]);
        }

        if cand.is_empty() {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            current.truncate(mark);
            return;
        }

        if current.len() + clique_cover_bound(self.adj, &cand) <= self.best.len() {
            current.truncate(mark);
            return;
        }

        let v = cand
            .iter()
            .max_by_key(|&v| (self.adj[v].count_and(&cand), std::cmp::Reverse(v)))
            .expect("candidate set is non-empty");

        let mut with_v = cand.clone();
        with_v.remove(v);
        with_v.and_not_assign(&self.adj[v]);
        current.push(v);
        self.run(with_v, current);
        current.pop();

        cand.remove(v);
        self.run(cand, current);
        current.truncate(mark);
    }
}

/// Number of cliques in a greedy clique partition of `cand`; an upper bound
/// on the independence number of the induced subgraph.
fn clique_cover_bound(adj: &[Bits], cand: &Bits) -> usize {
    let mut order: Vec<usize> = cand.iter().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_and(cand)));
    // Each entry is the set of vertices adjacent to every member of a clique.
    let mut common: Vec<Bits> = Vec::new();
    for v in order {
        match common.iter_mut().find(|c| c.contains(v)) {
            Some(c) => c.and_assign(&adj[v]),
            None => {
                let mut c = adj[v].clone();
                c.and_assign(cand);
                common.push(c);
            }
        }
    }
    common.len()
}

fn adjacency_bits(g: &Graph) -> Vec<Bits> {
    (0..g.n())
        .map(|v| {
            let mut b = Bits::empty(g.n());
            for &u in g.neighbors(v) {
                b.insert(u);
            }
            b
        })
        .collect()
}

/// Maximum independent set by branch and bound.
///
/// Without a budget, graphs above [`EXACT_VERTEX_LIMIT`] are refused. With a
/// budget (maximum number of search nodes), running out yields
/// [`ExactOutcome::BoundOnly`] rather than a silently suboptimal answer.
pub fn exact_mis(g: &Graph, budget: Option<u64>) -> Result<ExactOutcome, SolverError> {
    if budget.is_none() && g.n() > EXACT_VERTEX_LIMIT {
        return Err(SolverError::TooLarge {
            n: g.n(),
            limit: EXACT_VERTEX_LIMIT,
        });
    }
    let adj = adjacency_bits(g);
    let mut search = Search {
        adj: &adj,
        best: greedy_mis(g).members().to_vec(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    let all = Bits::full(g.n());
    search.run(all.clone(), &mut Vec::new());
    let best = VertexSet::independent(search.best);
    if search.exhausted {
        let bound = clique_cover_bound(&adj, &all).max(best.len());
        Ok(ExactOutcome::BoundOnly {
            incumbent: best,
            bound,
        })
    } else {
        Ok(ExactOutcome::Optimal(best))
    }
}

/// Minimum vertex cover as the complement of a maximum independent set.
pub fn exact_mvc(g: &Graph, budget: Option<u64>) -> Result<ExactOutcome, SolverError> {
    Ok(match exact_mis(g, budget)? {
        ExactOutcome::Optimal(is) => {
            ExactOutcome::Optimal(is.complement(g.n(), SetKind::VertexCover))
        }
        ExactOutcome::BoundOnly { incumbent, bound } => ExactOutcome::BoundOnly {
            incumbent: incumbent.complement(g.n(), SetKind::VertexCover),
            bound: g.n() - bound,
        },
    })
}

/// `|MIS(G)|` for graphs within the exact limit.
pub fn mis_size(g: &Graph) -> Result<usize, SolverError> {
    match exact_mis(g, None)? {
        ExactOutcome::Optimal(s) => Ok(s.len()),
        ExactOutcome::BoundOnly { .. } => unreachable!("no budget was given"),
    }
}

/// `|MVC(G)|` for graphs within the exact limit.
pub fn mvc_size(g: &Graph) -> Result<usize, SolverError> {
    Ok(g.n() - mis_size(g)?)
}
