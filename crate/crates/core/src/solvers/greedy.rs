use crate::graph::{Graph, VertexSet};

// Residual-graph bookkeeping shared by both greedy rules.
struct Residual<'a> {
    g: &'a Graph,
    alive: Vec<bool>,
    degree: Vec<usize>,
}

impl<'a> Residual<'a> {
    fn new(g: &'a Graph) -> Self {
        Self {
            g,
            alive: vec![true; g.n()],
            degree: (0..g.n()).map(|v| g.degree(v)).collect(),
        }
    }

    fn delete(&mut self, v: usize) {
        if !self.alive[v] {
            return;
        }
        self.alive[v] = false;
        for &u in self.g.neighbors(v) {
            if self.alive[u] {
                self.degree[u] -= 1;
            }
        }
    }

    /// Alive vertex optimising `key`, smallest id on ties.
    fn pick_by<K: Ord>(&self, key: impl Fn(usize) -> K) -> Option<usize> {
        let mut best: Option<(K, usize)> = None;
        for v in (0..self.g.n()).filter(|&v| self.alive[v]) {
            let k = key(self.degree[v]);
            if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
                best = Some((k, v));
            }
        }
        best.map(|(_, v)| v)
    }
}

/// Minimum-degree greedy: repeatedly take the vertex of smallest residual
/// degree (smallest id on ties) and delete it together with its neighbours.
pub fn greedy_mis(g: &Graph) -> VertexSet {
    let mut r = Residual::new(g);
    let mut chosen = Vec::new();
    while let Some(v) = r.pick_by(|d| d) {
        chosen.push(v);
        let nbrs: Vec<usize> = g.neighbors(v).to_vec();
        r.delete(v);
        for u in nbrs {
            r.delete(u);
        }
    }
    VertexSet::independent(chosen)
}

/// Maximum-degree greedy: repeatedly move the vertex of largest residual
/// degree (smallest id on ties) into the cover until no edge remains.
pub fn greedy_mvc(g: &Graph) -> VertexSet {
    let mut r = Residual::new(g);
    let mut cover = Vec::new();
    let mut remaining = g.m();
    while remaining > 0 {
        let v = r
            .pick_by(|d| std::cmp::Reverse(d))
            .expect("edges remain, so some vertex is alive");
        remaining -= r.degree[v];
        cover.push(v);
        r.delete(v);
    }
    VertexSet::cover(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenSpec, GraphModel};

    #[test]
    fn greedy_mis_examples() {
        assert_eq!(greedy_mis(&Graph::path(3)).members(), &[0, 2]);
        assert_eq!(greedy_mis(&Graph::empty(4)).len(), 4);
        assert_eq!(greedy_mis(&Graph::empty(0)).len(), 0);
    }

    #[test]
    fn greedy_mis_fails_on_special() {
        for (n, a) in [(5, 2), (20, 3), (10, 1)] {
            let g = generate(&GenSpec::new(GraphModel::Special { n, a }, 0)).unwrap();
            let s = greedy_mis(&g);
            assert_eq!(s.len(), 3);
            assert!(s.contains(0) && s.contains(1));
            assert!(s.members()[2] >= 2 + n);
        }
    }

    #[test]
    fn greedy_mvc_examples() {
        assert_eq!(greedy_mvc(&Graph::star(4)).members(), &[0]);
        assert_eq!(greedy_mvc(&Graph::complete(3)).len(), 2);
        // P4: vertex 1 first (degree 2, smallest id), then edge (2,3) leaves 2.
        assert_eq!(greedy_mvc(&Graph::path(4)).members(), &[1, 2]);
        assert!(greedy_mvc(&Graph::empty(3)).is_empty());
    }

    #[test]
    fn greedy_outputs_valid() {
        for seed in 0..20 {
            let g = generate(&GenSpec::new(
                GraphModel::ErdosRenyi { n: 30, p: 0.2 },
                seed,
            ))
            .unwrap();
            assert!(g.is_independent_set(greedy_mis(&g).members()));
            assert!(g.is_vertex_cover(greedy_mvc(&g).members()));
        }
    }
}
