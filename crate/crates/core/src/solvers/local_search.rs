use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexSet};

/// Stopping rule for [`local_search_mis`]; whichever limit is hit first wins.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimit {
    pub time: Duration,
    pub max_moves: Option<u64>,
}

impl SearchLimit {
    pub fn time(time: Duration) -> Self {
        Self {
            time,
            max_moves: None,
        }
    }

    /// Deterministic limit: a fixed number of moves, no wall-clock cutoff.
    pub fn moves(max_moves: u64) -> Self {
        Self {
            time: Duration::MAX,
            max_moves: Some(max_moves),
        }
    }
}

/// Random insertion local search: each move inserts a uniformly random
/// non-member and evicts its neighbours from the set. Returns the largest set
/// seen.
pub fn local_search_mis(g: &Graph, limit: SearchLimit, seed: u64) -> VertexSet {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let mut member = vec![false; n];
    // Non-members, with each vertex's position for O(1) swap-removal.
    let mut outside: Vec<usize> = (0..n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    let mut size = 0usize;
    let mut best: Vec<usize> = Vec::new();

    let mut moves = 0u64;
    while !outside.is_empty() {
        if limit.max_moves.is_some_and(|m| moves >= m) {
            break;
        }
        // Checking the clock every move is too slow for tiny graphs.
        if moves % 64 == 0 && start.elapsed() >= limit.time {
            break;
        }
        moves += 1;

        let v = outside[rng.gen_range(0..outside.len())];
        take_out(&mut outside, &mut pos, v);
        member[v] = true;
        size += 1;
        for &u in g.neighbors(v) {
            if member[u] {
                member[u] = false;
                size -= 1;
                pos[u] = outside.len();
                outside.push(u);
            }
        }
        if size > best.len() {
            best = (0..n).filter(|&u| member[u]).collect();
        }
    }
    VertexSet::independent(best)
}

fn take_out(outside: &mut Vec<usize>, pos: &mut [usize], v: usize) {
    let i = pos[v];
    let last = *outside.last().expect("v is outside");
    outside.swap_remove(i);
    if last != v {
        pos[last] = i;
    }
}
