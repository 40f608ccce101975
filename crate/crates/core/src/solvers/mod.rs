//! Exact oracles and classical baselines.

mod bitset;
mod exact;
mod greedy;
mod local_search;
mod lp;

pub use exact::{exact_mis, exact_mvc, mis_size, mvc_size, ExactOutcome, EXACT_VERTEX_LIMIT};
pub use greedy::{greedy_mis, greedy_mvc};
pub use local_search::{local_search_mis, SearchLimit};
pub use lp::emit_lp;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("graph has {n} vertices; exact search without a budget is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Which optimisation problem a solver or comparator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Problem {
    /// Maximum independent set; larger is better.
    #[default]
    Mis,
    /// Minimum vertex cover; smaller is better.
    Mvc,
}

impl Problem {
    /// True when a solution of size `a` is strictly better than one of size `b`.
    pub fn better(self, a: usize, b: usize) -> bool {
        match self {
            Problem::Mis => a > b,
            Problem::Mvc => a < b,
        }
    }

    /// The better of two solution sizes.
    pub fn best_of(self, a: usize, b: usize) -> usize {
        if self.better(b, a) {
            b
        } else {
            a
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Mis => "mis",
            Problem::Mvc => "mvc",
        })
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mis" => Ok(Problem::Mis),
            "mvc" => Ok(Problem::Mvc),
            other => Err(format!("unknown problem {other:?} (expected mis or mvc)")),
        }
    }
}
