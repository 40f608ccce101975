use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use cmpdp::graph::{read_graph_file, Graph};

use crate::{usage, Failure};

const EXTENSIONS: &[&str] = &["col", "dimacs", "graph", "txt"];

/// Graph files of a directory in name order, keyed by file stem.
pub fn load_dataset(dir: &Path) -> Result<Vec<(String, Graph)>, Failure> {
    if !dir.is_dir() {
        return Err(usage(format!("{} is not a directory", dir.display())));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| EXTENSIONS.contains(&e))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(usage(format!("no graph files in {}", dir.display())));
    }
    paths
        .into_iter()
        .map(|p| {
            let id = p
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            let g = read_graph_file(&p).with_context(|| format!("reading {}", p.display()))?;
            Ok((id, g))
        })
        .collect()
}

pub fn graphs_only(named: Vec<(String, Graph)>) -> Vec<Graph> {
    named.into_iter().map(|(_, g)| g).collect()
}
