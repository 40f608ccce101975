//! CPLEX LP-format export of the 0/1 programs for MIS and MVC.

use std::fmt::Write;

use super::Problem;
use crate::graph::Graph;

/// Variables are named `x1..xn` (1-based, matching the graph file ids); one
/// constraint per undirected edge.
pub fn emit_lp(g: &Graph, problem: Problem) -> String {
    let (title, sense, rel) = match problem {
        Problem::Mis => ("maximum independent set", "Maximize", "<="),
        Problem::Mvc => ("minimum vertex cover", "Minimize", ">="),
    };
    let mut out = String::new();
    writeln!(out, "\\ {title}: {} vertices, {} edges", g.n(), g.m()).unwrap();
    writeln!(out, "{sense}").unwrap();
    let objective: Vec<String> = (1..=g.n()).map(|i| format!("x{i}")).collect();
    writeln!(out, " obj: {}", objective.join(" + ")).unwrap();
    writeln!(out, "Subject To").unwrap();
    for (k, (u, v)) in g.edges().enumerate() {
        writeln!(out, " e{}: x{} + x{} {rel} 1", k + 1, u + 1, v + 1).unwrap();
    }
    writeln!(out, "Binary").unwrap();
    for chunk in objective.chunks(16) {
        writeln!(out, " {}", chunk.join(" ")).unwrap();
    }
    writeln!(out, "End").unwrap();
    out
}
