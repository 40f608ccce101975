//! Undirected simple graphs and the vertex-removal primitives the recursive
//! solvers are built from.

mod generate;
mod io;
mod vertex_set;

pub use generate::{generate, GenSpec, GraphModel};
pub use io::{
    parse_graph, parse_solution, read_graph_file, write_graph, write_graph_file, write_solution,
    ParseError,
};
pub use vertex_set::{SetKind, ValidityError, VertexSet};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {v} does not exist in a graph with {n} vertices")]
    InvalidVertex { v: usize, n: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

/// Immutable undirected simple graph on vertices `0..n`.
///
/// Adjacency lists are sorted and symmetric; there are no self-loops and no
/// parallel edges.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

/// Relabelling produced by a vertex removal: entry `i` is the id, in the
/// parent graph, of vertex `i` of the child graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    parent_of: Vec<usize>,
}

impl IdMap {
    pub fn identity(n: usize) -> Self {
        Self {
            parent_of: (0..n).collect(),
        }
    }

    /// Parent id of child vertex `v`.
    #[inline]
    pub fn parent(&self, v: usize) -> usize {
        self.parent_of[v]
    }

    pub fn len(&self) -> usize {
        self.parent_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent_of.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.parent_of
    }

    /// Rewrites `labels` (indexed by parent id) into labels indexed by child id.
    pub fn pull_back<T: Copy>(&self, labels: &[T]) -> Vec<T> {
        self.parent_of.iter().map(|&p| labels[p]).collect()
    }
}

impl Graph {
    /// Builds a graph from an edge list, silently merging duplicate edges.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_raw_adjacency(adj))
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Self {
            adj,
            m: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least three vertices");
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle edges are valid")
    }

    /// Star with vertex 0 as the centre and `leaves` pendant vertices.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star edges are valid")
    }

    // Sorts and dedups; caller guarantees symmetry and no self-loops.
    fn from_raw_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let mut deg_sum = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            deg_sum += list.len();
        }
        Self {
            adj,
            m: deg_sum / 2,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { v, n: self.n() })
        }
    }

    /// Induced subgraph on the vertices whose `keep` flag is set, with ids
    /// compacted in increasing order.
    pub fn induced(&self, keep: &[bool]) -> (Graph, IdMap) {
        debug_assert_eq!(keep.len(), self.n());
        let mut new_id = vec![usize::MAX; self.n()];
        let mut parent_of = Vec::with_capacity(self.n());
        for (v, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            new_id[v] = parent_of.len();
            parent_of.push(v);
        }
        let mut m2 = 0;
        let adj = parent_of
            .iter()
            .map(|&old| {
                let list: Vec<usize> = self.adj[old]
                    .iter()
                    .filter_map(|&u| (new_id[u] != usize::MAX).then_some(new_id[u]))
                    .collect();
                m2 += list.len();
                list
            })
            .collect();
        (Graph { adj, m: m2 / 2 }, IdMap { parent_of })
    }

    /// `G \ {v}`: deletes `v` and its incident edges.
    pub fn remove_vertex(&self, v: usize) -> Result<(Graph, IdMap), GraphError> {
        self.check_vertex(v)?;
        let mut keep = vec![true; self.n()];
        keep[v] = false;
        Ok(self.induced(&keep))
    }

    /// `G \ N(v)`: deletes every neighbour of `v`. The vertex `v` itself stays
    /// and is isolated in the result.
    pub fn remove_neighbors(&self, v: usize) -> Result<(Graph, IdMap), GraphError> {
        self.check_vertex(v)?;
        let mut keep = vec![true; self.n()];
        for &u in &self.adj[v] {
            keep[u] = false;
        }
        Ok(self.induced(&keep))
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        let mut adj = vec![Vec::new(); self.n()];
        for (v, list) in self.adj.iter().enumerate() {
            adj[perm[v]] = list.iter().map(|&u| perm[u]).collect();
        }
        Self::from_raw_adjacency(adj)
    }

    /// Builds a graph from adjacency lists that are already symmetric and loop-free.
    pub(crate) fn from_symmetric_lists(adj: Vec<Vec<usize>>) -> Graph {
        debug_assert!(adj
            .iter()
            .enumerate()
            .all(|(v, l)| l.iter().all(|&u| u != v && adj[u].contains(&v))));
        Self::from_raw_adjacency(adj)
    }

    pub(crate) fn into_lists(self) -> Vec<Vec<usize>> {
        self.adj
    }

    pub fn is_independent_set(&self, members: &[usize]) -> bool {
        let mut mark = vec![false; self.n()];
        for &v in members {
            if v >= self.n() {
                return false;
            }
            mark[v] = true;
        }
        members
            .iter()
            .all(|&v| self.adj[v].iter().all(|&u| !mark[u]))
    }

    pub fn is_vertex_cover(&self, members: &[usize]) -> bool {
        let mut mark = vec![false; self.n()];
        for &v in members {
            if v >= self.n() {
                return false;
            }
            mark[v] = true;
        }
        self.edges().all(|(u, v)| mark[u] || mark[v])
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}
