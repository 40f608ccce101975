//! Oracles and fixtures shared by the integration suites. Nothing here
//! calls into the library's solvers.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cmpdp::graph::{generate, GenSpec, Graph, GraphModel};
use rand::Rng;

pub fn random_er<R: Rng>(rng: &mut R, n_lo: usize, n_hi: usize, p: f64) -> Graph {
    let n = rng.gen_range(n_lo..=n_hi);
    generate(&GenSpec::new(GraphModel::ErdosRenyi { n, p }, rng.gen())).unwrap()
}

/// Size of a maximum independent set by enumerating all 2^n subsets.
pub fn brute_force_mis(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20, "brute force is only for tiny graphs");
    let nbr_mask: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut best = 0;
    for subset in 0u32..(1 << n) {
        let independent = (0..n).all(|v| subset >> v & 1 == 0 || subset & nbr_mask[v] == 0);
        if independent {
            best = best.max(subset.count_ones() as usize);
        }
    }
    best
}

/// A parsed LP file: objective sense, objective variables, constraints as
/// (variables, relation, rhs) and the binary section.
#[derive(Debug, Default)]
pub struct LpFile {
    pub sense: String,
    pub objective: Vec<String>,
    pub constraints: Vec<(Vec<String>, String, i64)>,
    pub binaries: Vec<String>,
}

/// Minimal reader for the subset of the LP format the emitter produces.
pub fn parse_lp(text: &str) -> Result<LpFile, String> {
    let mut lp = LpFile::default();
    let mut section = "";
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "maximize" | "minimize" => {
                lp.sense = line.to_ascii_lowercase();
                section = "objective";
                continue;
            }
            "subject to" => {
                section = "constraints";
                continue;
            }
            "binary" => {
                section = "binary";
                continue;
            }
            "end" => {
                section = "end";
                continue;
            }
            _ => {}
        }
        let body = |l: &str| {
            l.split_once(':')
                .map(|(_, b)| b.trim().to_string())
                .ok_or(format!("no label: {l}"))
        };
        match section {
            "objective" => {
                lp.objective = body(line)?
                    .split('+')
                    .map(|t| t.trim().to_string())
                    .filter(|t| !t.is_empty())
                    .collect();
            }
            "constraints" => {
                let b = body(line)?;
                let tokens: Vec<&str> = b.split_whitespace().collect();
                let rel_at = tokens
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "="))
                    .ok_or(format!("no relation: {line}"))?;
                let vars = tokens[..rel_at]
                    .iter()
                    .filter(|t| **t != "+")
                    .map(|t| t.to_string())
                    .collect();
                let rhs = tokens
                    .get(rel_at + 1)
                    .ok_or("missing rhs")?
                    .parse()
                    .map_err(|_| "bad rhs")?;
                lp.constraints.push((vars, tokens[rel_at].to_string(), rhs));
            }
            "binary" => lp
                .binaries
                .extend(line.split_whitespace().map(String::from)),
            _ => return Err(format!("content outside a section: {line}")),
        }
    }
    if section != "end" {
        return Err("missing End".into());
    }
    Ok(lp)
}

/// Multiset of undirected edges named the way the LP file names variables.
pub fn edge_names(g: &Graph) -> BTreeMap<(String, String), usize> {
    let mut out = BTreeMap::new();
    for v in 0..g.n() {
        for &u in g.neighbors(v) {
            if v < u {
                *out.entry((format!("x{}", v + 1), format!("x{}", u + 1)))
                    .or_default() += 1;
            }
        }
    }
    out
}

/// Size of a minimum vertex cover by enumerating all 2^n subsets.
pub fn brute_force_mvc(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20, "brute force is only for tiny graphs");
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| {
            g.neighbors(v)
                .iter()
                .filter(move |&&u| v < u)
                .map(move |&u| (v, u))
        })
        .collect();
    (0u32..(1 << n))
        .filter(|s| {
            edges
                .iter()
                .all(|&(a, b)| s >> a & 1 == 1 || s >> b & 1 == 1)
        })
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}
