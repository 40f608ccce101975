//! Seeded synthetic graph families.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    /// Gilbert `G(n, p)`.
    ErdosRenyi { n: usize, p: f64 },
    /// Preferential attachment: each new vertex links to `attach` distinct
    /// existing vertices, seeded with a clique on `attach + 1` vertices.
    BarabasiAlbert { n: usize, attach: usize },
    /// Ring lattice where every vertex links to its `k` nearest neighbours
    /// (`k` even), then each lattice edge is rewired with probability `beta`.
    WattsStrogatz { n: usize, k: usize, beta: f64 },
    /// Two hub vertices `u`, `v` joined to an independent set `I` of size `n`;
    /// every vertex of `I` is joined to every vertex of a clique `C` of size
    /// `n + a`. Vertex layout: `u = 0`, `v = 1`, `I = 2..n+2`, `C` after that.
    Special { n: usize, a: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub model: GraphModel,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(model: GraphModel, seed: u64) -> Self {
        Self { model, seed }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidParameters(msg));
        match self.model {
            GraphModel::ErdosRenyi { n, p } => {
                if n == 0 {
                    return bad("ER: n must be positive".into());
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("ER: p = {p} is not a probability"));
                }
            }
            GraphModel::BarabasiAlbert { n, attach } => {
                if attach == 0 || n <= attach {
                    return bad(format!(
                        "BA: need 1 <= attach < n, got attach={attach}, n={n}"
                    ));
                }
            }
            GraphModel::WattsStrogatz { n, k, beta } => {
                if k == 0 || k % 2 != 0 || k >= n {
                    return bad(format!("WS: need even k with 2 <= k < n, got k={k}, n={n}"));
                }
                if !(0.0..=1.0).contains(&beta) {
                    return bad(format!("WS: beta = {beta} is not a probability"));
                }
            }
            GraphModel::Special { n, .. } => {
                if n == 0 {
                    return bad("SPECIAL: n must be positive".into());
                }
            }
        }
        Ok(())
    }
}

/// Draws one graph; identical specs (seed included) give identical graphs.
pub fn generate(spec: &GenSpec) -> Result<Graph, GraphError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = match spec.model {
        GraphModel::ErdosRenyi { n, p } => erdos_renyi(n, p, &mut rng),
        GraphModel::BarabasiAlbert { n, attach } => barabasi_albert(n, attach, &mut rng),
        GraphModel::WattsStrogatz { n, k, beta } => watts_strogatz(n, k, beta, &mut rng),
        GraphModel::Special { n, a } => special(n, a),
    };
    Ok(g)
}

fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("ER edges are in range")
}

fn barabasi_albert<R: Rng>(n: usize, attach: usize, rng: &mut R) -> Graph {
    let seed_size = attach + 1;
    let mut edges = Vec::new();
    // Every endpoint occurrence, so uniform draws are degree-proportional.
    let mut endpoints = Vec::new();
    for u in 0..seed_size {
        for v in u + 1..seed_size {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    for new in seed_size..n {
        let mut targets = BTreeSet::new();
        while targets.len() < attach {
            targets.insert(*endpoints.choose(rng).expect("seed clique is non-empty"));
        }
        for t in targets {
            edges.push((new, t));
            endpoints.extend([new, t]);
        }
    }
    Graph::new(n, edges).expect("BA edges are in range")
}

fn watts_strogatz<R: Rng>(n: usize, k: usize, beta: f64, rng: &mut R) -> Graph {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || !rng.gen_bool(beta) {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    Graph::from_symmetric_lists(adj.into_iter().map(|s| s.into_iter().collect()).collect())
}

fn special(n: usize, a: usize) -> Graph {
    let (u, v) = (0, 1);
    let indep = 2..2 + n;
    let clique = 2 + n..2 + 2 * n + a;
    let total = clique.end;
    let mut edges = Vec::new();
    for i in indep.clone() {
        edges.push((u, i));
        edges.push((v, i));
        for c in clique.clone() {
            edges.push((i, c));
        }
    }
    for c in clique.clone() {
        for d in c + 1..clique.end {
            edges.push((c, d));
        }
    }
    Graph::new(total, edges).expect("SPECIAL edges are in range")
}
