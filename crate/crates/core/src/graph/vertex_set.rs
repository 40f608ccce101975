use std::fmt;

use thiserror::Error;

use super::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    IndependentSet,
    VertexCover,
    Generic,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::IndependentSet => "independent set",
            SetKind::VertexCover => "vertex cover",
            SetKind::Generic => "vertex set",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidityError {
    #[error("vertex {v} is outside a graph with {n} vertices")]
    OutOfRange { v: usize, n: usize },
    #[error("independent set contains adjacent vertices {0} and {1}")]
    AdjacentMembers(usize, usize),
    #[error("edge ({0}, {1}) is not covered")]
    Uncovered(usize, usize),
}

/// Sorted, duplicate-free set of vertex ids tagged with the role it plays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<usize>,
    kind: SetKind,
}

impl VertexSet {
    pub fn new(kind: SetKind, members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members, kind }
    }

    pub fn independent(members: impl IntoIterator<Item = usize>) -> Self {
        Self::new(SetKind::IndependentSet, members)
    }

    pub fn cover(members: impl IntoIterator<Item = usize>) -> Self {
        Self::new(SetKind::VertexCover, members)
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// `V \ S`, tagged with `kind`.
    pub fn complement(&self, n: usize, kind: SetKind) -> VertexSet {
        let mut mark = vec![false; n];
        for &v in &self.members {
            mark[v] = true;
        }
        VertexSet::new(kind, (0..n).filter(|&v| !mark[v]))
    }

    /// Checks the set against `g` according to its kind.
    pub fn validate(&self, g: &Graph) -> Result<(), ValidityError> {
        let n = g.n();
        if let Some(&v) = self.members.iter().find(|&&v| v >= n) {
            return Err(ValidityError::OutOfRange { v, n });
        }
        match self.kind {
            SetKind::IndependentSet => {
                for &v in &self.members {
                    if let Some(&u) = g.neighbors(v).iter().find(|&&u| self.contains(u)) {
                        return Err(ValidityError::AdjacentMembers(v.min(u), v.max(u)));
                    }
                }
                Ok(())
            }
            SetKind::VertexCover => match g
                .edges()
                .find(|&(u, v)| !self.contains(u) && !self.contains(v))
            {
                Some((u, v)) => Err(ValidityError::Uncovered(u, v)),
                None => Ok(()),
            },
            SetKind::Generic => Ok(()),
        }
    }
}
