//! Approximation-ratio evaluation of solvers over a dataset.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::dp::{best_of_rollouts, derive_seed, LearnedComparator, RandomComparator};
use crate::graph::{Graph, SetKind, VertexSet};
use crate::nn::{Params, Scalar};
use crate::solvers::{
    exact_mis, exact_mvc, greedy_mis, greedy_mvc, local_search_mis, Problem, SearchLimit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Learned comparator, best of `m` roll-outs.
    Learned,
    /// Learned roll-outs floored by the greedy solution.
    LearnedMixed,
    Greedy,
    /// Random comparator, best of `m` roll-outs.
    Random,
    LocalSearch,
    Exact,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Learned,
        Method::LearnedMixed,
        Method::Greedy,
        Method::Random,
        Method::LocalSearch,
        Method::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Learned => "cmp",
            Method::LearnedMixed => "cmp-mixed",
            Method::Greedy => "greedy",
            Method::Random => "random",
            Method::LocalSearch => "local-search",
            Method::Exact => "exact",
        }
    }

    pub fn needs_params(self) -> bool {
        matches!(self, Method::Learned | Method::LearnedMixed)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected one of cmp, cmp-mixed, greedy, random, local-search, exact)"))
    }
}

/// Everything a method may need besides the graph.
#[derive(Debug, Clone, Copy)]
pub struct SolveContext<'a, T> {
    pub problem: Problem,
    pub params: Option<&'a Params<T>>,
    /// Roll-outs for the comparator methods.
    pub m: usize,
    pub local_search: SearchLimit,
    /// Node budget of the exact search; `None` means unlimited.
    pub exact_budget: Option<u64>,
    pub seed: u64,
}

impl<'a, T> SolveContext<'a, T> {
    pub fn new(problem: Problem) -> Self {
        Self {
            problem,
            params: None,
            m: 3,
            local_search: SearchLimit::time(Duration::from_millis(200)),
            exact_budget: Some(5_000_000),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("method {0} needs trained parameters")]
    MissingParams(Method),
    #[error("exact search did not finish within its budget")]
    OverBudget,
    #[error("{0}")]
    Solver(#[from] crate::solvers::SolverError),
}

/// Runs one method on one graph.
pub fn solve_with<T: Scalar>(
    g: &Graph,
    method: Method,
    ctx: &SolveContext<'_, T>,
) -> Result<VertexSet, EvalError> {
    let problem = ctx.problem;
    let greedy = || match problem {
        Problem::Mis => greedy_mis(g),
        Problem::Mvc => greedy_mvc(g),
    };
    let rollouts = |cmp: &dyn crate::dp::Comparator| {
        best_of_rollouts(problem, g, cmp, ctx.m.max(1), ctx.seed).expect("at least one roll-out")
    };
    let set = match method {
        Method::Learned | Method::LearnedMixed => {
            let params = ctx.params.ok_or(EvalError::MissingParams(method))?;
            let found = rollouts(&LearnedComparator::new(params));
            if method == Method::LearnedMixed {
                let alt = greedy();
                if problem.better(alt.len(), found.len()) {
                    alt
                } else {
                    found
                }
            } else {
                found
            }
        }
        Method::Greedy => greedy(),
        Method::Random => rollouts(&RandomComparator),
        Method::LocalSearch => {
            let is = local_search_mis(g, ctx.local_search, ctx.seed);
            match problem {
                Problem::Mis => is,
                Problem::Mvc => is.complement(g.n(), SetKind::VertexCover),
            }
        }
        Method::Exact => {
            let outcome = match problem {
                Problem::Mis => exact_mis(g, ctx.exact_budget)?,
                Problem::Mvc => exact_mvc(g, ctx.exact_budget)?,
            };
            outcome.optimal().ok_or(EvalError::OverBudget)?
        }
    };
    Ok(set)
}

/// Found size over optimum for MIS, and the same quotient (at least 1) for
/// MVC. A zero optimum with a zero-size solution counts as 1.
pub fn approximation_ratio(size: usize, optimum: usize) -> f64 {
    if optimum == 0 {
        if size == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        size as f64 / optimum as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub size: usize,
    /// `None` when the exact search ran out of budget.
    pub optimum: Option<usize>,
    pub ratio: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub mean: f64,
    /// Population standard deviation of the ratios.
    pub std: f64,
    pub count: usize,
    /// Rows without a certified optimum, left out of the statistics.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub problem: Problem,
    pub rows: Vec<EvalRow>,
    pub summary: Vec<MethodSummary>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl EvalReport {
    pub fn from_rows(problem: Problem, rows: Vec<EvalRow>) -> Self {
        let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
        methods.sort();
        methods.dedup();
        let summary = methods
            .into_iter()
            .map(|method| {
                let of_method = rows.iter().filter(|r| r.method == method);
                let ratios: Vec<f64> = of_method.clone().filter_map(|r| r.ratio).collect();
                let (mean, std) = mean_std(&ratios);
                MethodSummary {
                    method,
                    mean,
                    std,
                    count: ratios.len(),
                    excluded: of_method.filter(|r| r.ratio.is_none()).count(),
                }
            })
            .collect();
        Self {
            problem,
            rows,
            summary,
        }
    }

    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    pub fn write_rows_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "graph_id,n,m,method,size,optimum,ratio,seconds")?;
        for r in &self.rows {
            let optimum = r.optimum.map_or("bound".to_string(), |o| o.to_string());
            let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.6}"));
            writeln!(
                out,
                "{},{},{},{},{},{},{},{:.6}",
                r.graph_id, r.n, r.m, r.method, r.size, optimum, ratio, r.seconds
            )?;
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "method,problem,mean_ratio,std_ratio,count,excluded")?;
        for s in &self.summary {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{},{}",
                s.method, self.problem, s.mean, s.std, s.count, s.excluded
            )?;
        }
        Ok(())
    }
}

/// Evaluates every method on every graph against the exact optimum.
///
/// Graph `i` is solved with seed `derive_seed(ctx.seed, i)`, so the report
/// does not depend on scheduling. A graph whose optimum cannot be certified
/// keeps its rows with `optimum = None`.
pub fn eval_dataset<T: Scalar>(
    graphs: &[(String, Graph)],
    methods: &[Method],
    ctx: &SolveContext<'_, T>,
) -> Result<EvalReport, EvalError> {
    if let Some(&m) = methods.iter().find(|m| m.needs_params()) {
        if ctx.params.is_none() {
            return Err(EvalError::MissingParams(m));
        }
    }
    let per_graph: Vec<Result<Vec<EvalRow>, EvalError>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, (id, g))| {
            let local = SolveContext {
                seed: derive_seed(ctx.seed, i as u64),
                ..*ctx
            };
            let optimum = match solve_with(g, Method::Exact, &local) {
                Ok(s) => Some(s.len()),
                Err(EvalError::OverBudget) | Err(EvalError::Solver(_)) => None,
                Err(e) => return Err(e),
            };
            let mut rows = Vec::with_capacity(methods.len());
            for &method in methods {
                let start = Instant::now();
                let size = match solve_with(g, method, &local) {
                    Ok(s) => s.len(),
                    Err(EvalError::OverBudget) | Err(EvalError::Solver(_))
                        if method == Method::Exact =>
                    {
                        rows.push(EvalRow {
                            graph_id: id.clone(),
                            n: g.n(),
                            m: g.m(),
                            method,
                            size: 0,
                            optimum: None,
                            ratio: None,
                            seconds: start.elapsed().as_secs_f64(),
                        });
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                rows.push(EvalRow {
                    graph_id: id.clone(),
                    n: g.n(),
                    m: g.m(),
                    method,
                    size,
                    optimum,
                    ratio: optimum.map(|o| approximation_ratio(size, o)),
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for part in per_graph {
        rows.extend(part?);
    }
    Ok(EvalReport::from_rows(ctx.problem, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenSpec, GraphModel};

    fn ctx(problem: Problem) -> SolveContext<'static, f64> {
        SolveContext {
            local_search: SearchLimit::moves(200),
            ..SolveContext::new(problem)
        }
    }

    fn named(gs: Vec<Graph>) -> Vec<(String, Graph)> {
        gs.into_iter()
            .enumerate()
            .map(|(i, g)| (format!("g{i}"), g))
            .collect()
    }

    #[test]
    fn edgeless_graphs_score_one() {
        let data = named(vec![Graph::empty(3), Graph::empty(6)]);
        let methods = [
            Method::Greedy,
            Method::Random,
            Method::LocalSearch,
            Method::Exact,
        ];
        for problem in [Problem::Mis, Problem::Mvc] {
            let rep = eval_dataset(&data, &methods, &ctx(problem)).unwrap();
            assert!(rep.rows.iter().all(|r| r.ratio == Some(1.0)));
        }
    }

    #[test]
    fn special_greedy_ratio() {
        let g = generate(&GenSpec::new(GraphModel::Special { n: 20, a: 3 }, 0)).unwrap();
        let rep = eval_dataset(&named(vec![g]), &[Method::Greedy], &ctx(Problem::Mis)).unwrap();
        assert_eq!(rep.rows[0].size, 3);
        assert_eq!(rep.rows[0].optimum, Some(20));
        assert_eq!(rep.rows[0].ratio, Some(0.15));
    }

    #[test]
    fn triangle_random_is_optimal() {
        let rep = eval_dataset(
            &named(vec![Graph::complete(3)]),
            &[Method::Random],
            &ctx(Problem::Mis),
        )
        .unwrap();
        assert_eq!(rep.rows[0].ratio, Some(1.0));
    }

    #[test]
    fn mvc_ratios_at_least_one() {
        let data = named(
            (0..6)
                .map(|s| {
                    generate(&GenSpec::new(GraphModel::ErdosRenyi { n: 14, p: 0.3 }, s)).unwrap()
                })
                .collect(),
        );
        let rep =
            eval_dataset(&data, &[Method::Greedy, Method::Random], &ctx(Problem::Mvc)).unwrap();
        assert!(rep.rows.iter().all(|r| r.ratio.unwrap() >= 1.0));
    }

    #[test]
    fn summary_matches_rows() {
        let data = named(
            (0..8)
                .map(|s| {
                    generate(&GenSpec::new(GraphModel::ErdosRenyi { n: 16, p: 0.25 }, s)).unwrap()
                })
                .collect(),
        );
        let rep =
            eval_dataset(&data, &[Method::Greedy, Method::Random], &ctx(Problem::Mis)).unwrap();
        for s in &rep.summary {
            let ratios: Vec<f64> = rep
                .rows
                .iter()
                .filter(|r| r.method == s.method)
                .filter_map(|r| r.ratio)
                .collect();
            assert_eq!((s.mean, s.std), mean_std(&ratios));
            assert_eq!(s.count, 8);
        }
    }

    #[test]
    fn over_budget_rows_are_excluded() {
        let g = generate(&GenSpec::new(GraphModel::ErdosRenyi { n: 60, p: 0.5 }, 1)).unwrap();
        let c = SolveContext {
            exact_budget: Some(1),
            ..ctx(Problem::Mis)
        };
        let rep = eval_dataset(&named(vec![g]), &[Method::Greedy, Method::Exact], &c).unwrap();
        assert!(rep
            .rows
            .iter()
            .all(|r| r.optimum.is_none() && r.ratio.is_none()));
        assert_eq!(rep.summary_for(Method::Greedy).unwrap().excluded, 1);
        let mut csv = Vec::new();
        rep.write_rows_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().contains(",bound,"));
    }

    #[test]
    fn learned_needs_params() {
        let err = eval_dataset(
            &named(vec![Graph::path(3)]),
            &[Method::Learned],
            &ctx(Problem::Mis),
        )
        .unwrap_err();
        assert_eq!(err, EvalError::MissingParams(Method::Learned));
        let p = Params::<f64>::init(crate::nn::Geometry::new(1, 4, 2).unwrap(), 0);
        let c = SolveContext {
            params: Some(&p),
            ..ctx(Problem::Mis)
        };
        let rep = eval_dataset(
            &named(vec![Graph::path(5)]),
            &[Method::Learned, Method::LearnedMixed],
            &c,
        )
        .unwrap();
        assert!(rep.rows[1].size >= 3);
    }
}
