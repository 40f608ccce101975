use std::fmt::Write;

use crate::graph::{Graph, VertexSet};

/// One branching decision of a recursive solve.
#[derive(Debug, Clone)]
pub struct Step {
    /// Instance at this level, in its own compacted ids.
    pub graph: Graph,
    /// Branch vertex, in `graph`'s ids.
    pub vertex: usize,
    /// First sibling (`v` removed for MIS, neighbours covered for MVC).
    pub branch0: Graph,
    /// Second sibling (neighbours removed for MIS, `v` covered for MVC).
    pub branch1: Graph,
    /// Comparator output; `true` means the recursion followed `branch1`.
    pub took_branch1: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// Final solution in the original graph's ids.
    pub result: VertexSet,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One line per step, then the result.
    pub fn to_debug_lines(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                out,
                "step {i}: n={} m={} v={} g0=({},{}) g1=({},{}) cmp={}",
                s.graph.n(),
                s.graph.m(),
                s.vertex,
                s.branch0.n(),
                s.branch0.m(),
                s.branch1.n(),
                s.branch1.m(),
                u8::from(s.took_branch1)
            )
            .unwrap();
        }
        let ids: Vec<String> = self.result.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "result {} size={} [{}]",
            self.result.kind(),
            self.result.len(),
            ids.join(" ")
        )
        .unwrap();
        out
    }
}
