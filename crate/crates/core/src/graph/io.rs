//! DIMACS-style text format: `c` comment lines, one `p edge <n> <m>` header
//! and `e <u> <v>` edge lines with 1-based vertex ids.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::{Graph, VertexSet};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: expected an integer, found {token:?}")]
    NotAnInteger { line: usize, token: String },
    #[error("line {line}: vertex {id} is outside 1..={n}")]
    VertexOutOfRange { line: usize, id: usize, n: usize },
    #[error("line {line}: self-loop on vertex {id}")]
    SelfLoop { line: usize, id: usize },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing `p edge` header")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn int(token: &str, line: usize) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::NotAnInteger {
        line,
        token: token.to_owned(),
    })
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        match tag {
            "c" => continue,
            "p" => {
                if n.is_some() {
                    return Err(ParseError::Header {
                        line,
                        msg: "duplicate header".into(),
                    });
                }
                let rest: Vec<&str> = tokens.collect();
                if rest.len() != 3 || rest[0] != "edge" {
                    return Err(ParseError::Header {
                        line,
                        msg: format!("expected `p edge <n> <m>`, found {raw:?}"),
                    });
                }
                n = Some(int(rest[1], line)?);
                int(rest[2], line)?;
            }
            "e" => {
                let Some(n) = n else {
                    return Err(ParseError::Malformed {
                        line,
                        msg: "edge before `p edge` header".into(),
                    });
                };
                let rest: Vec<&str> = tokens.collect();
                if rest.len() != 2 {
                    return Err(ParseError::Malformed {
                        line,
                        msg: format!("expected `e <u> <v>`, found {raw:?}"),
                    });
                }
                let (u, v) = (int(rest[0], line)?, int(rest[1], line)?);
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(ParseError::VertexOutOfRange { line, id, n });
                    }
                }
                if u == v {
                    return Err(ParseError::SelfLoop { line, id: u });
                }
                edges.push((u - 1, v - 1));
            }
            other => {
                return Err(ParseError::Malformed {
                    line,
                    msg: format!("unknown line type {other:?}"),
                })
            }
        }
    }
    let n = n.ok_or(ParseError::MissingHeader)?;
    Ok(Graph::new(n, edges).expect("edges validated while parsing"))
}

/// Canonical text form: header, then each edge once with `u < v`, sorted.
pub fn write_graph(g: &Graph) -> String {
    use std::fmt::Write as _;
    let mut out = format!("p edge {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).expect("writing to a String");
    }
    out
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<Graph, ParseError> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph_file(g: &Graph, path: impl AsRef<Path>) -> io::Result<()> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    f.write_all(write_graph(g).as_bytes())?;
    f.flush()
}

/// Solution file: `s <size>`, then one 1-based vertex id per line.
pub fn write_solution(set: &VertexSet) -> String {
    use std::fmt::Write as _;
    let mut out = format!("s {}\n", set.len());
    for v in set.iter() {
        writeln!(out, "{}", v + 1).expect("writing to a String");
    }
    out
}

/// Reads a solution file back into 0-based ids.
pub fn parse_solution(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut size = None;
    let mut ids = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('c') {
            continue;
        }
        match size {
            None => {
                let mut t = l.split_whitespace();
                if t.next() != Some("s") {
                    return Err(ParseError::Header {
                        line,
                        msg: "expected `s <size>`".into(),
                    });
                }
                let count = t.next().ok_or_else(|| ParseError::Header {
                    line,
                    msg: "missing size".into(),
                })?;
                size = Some(int(count, line)?);
            }
            Some(_) => {
                let id = int(l, line)?;
                if id == 0 {
                    return Err(ParseError::Malformed {
                        line,
                        msg: "vertex ids are 1-based".into(),
                    });
                }
                ids.push(id - 1);
            }
        }
    }
    let size = size.ok_or(ParseError::Header {
        line: 0,
        msg: "missing `s <size>` line".into(),
    })?;
    if size != ids.len() {
        return Err(ParseError::Malformed {
            line: 0,
            msg: format!("header announces {size} vertices, file lists {}", ids.len()),
        });
    }
    Ok(ids)
}
