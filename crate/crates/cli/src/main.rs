//! `cmpdp`: generate graphs, train comparators, solve and evaluate.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when the work itself fails.

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmpdp::config::{load_config, RunConfig};
use cmpdp::solvers::Problem;

#[derive(Debug, Parser)]
#[command(
    name = "cmpdp",
    version,
    about = "Comparator-steered DP for maximum independent set and minimum vertex cover"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// key=value config file; CMPDP_<KEY> variables and flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. `--set lr=0.01`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<Problem>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelKind {
    Er,
    Ba,
    Ws,
    Special,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AblateParam {
    #[value(name = "K")]
    K,
    #[value(name = "L")]
    L,
    #[value(name = "D")]
    D,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset, one graph file per instance.
    Gen {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Vertex count (independent-set size for SPECIAL); sets both bounds.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 15)]
        n_min: usize,
        #[arg(long, default_value_t = 35)]
        n_max: usize,
        /// ER edge probability.
        #[arg(long, default_value_t = 0.15)]
        p: f64,
        /// BA edges per new vertex.
        #[arg(long, default_value_t = 2)]
        attach: usize,
        /// WS ring degree.
        #[arg(long, default_value_t = 4)]
        ring_degree: usize,
        /// WS rewiring probability.
        #[arg(long, default_value_t = 0.1)]
        beta: f64,
        /// SPECIAL clique surplus.
        #[arg(long, default_value_t = 3)]
        a: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Self-train a comparator on a dataset directory.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        epochs: Option<usize>,
        /// Use mixed roll-outs for labels.
        #[arg(long)]
        mixed: bool,
        /// Weight file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Solve one graph with one method and write a solution file.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "greedy")]
        method: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Solution file; defaults to the graph path with `.sol` appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Approximation ratios of several methods over a dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "greedy,random")]
        methods: Vec<String>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Per-graph rows.
        #[arg(long)]
        out: PathBuf,
        /// Per-method mean and std.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Train and record the consistency curve, one row per buffer refresh.
    Consistency {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the 0/1 program of a graph in LP format.
    EmitLp {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = parse_problem, default_value = "mis")]
        problem: Problem,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One training run per value of a network dimension.
    Ablate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        param: AblateParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        epochs: Option<usize>,
        /// Held-out graphs for a ratio column.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse()
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl ConfigArgs {
    /// Defaults, then the file, then the environment, then flags.
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                load_config(path).map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.apply_env(std::env::vars())
            .map_err(|e| usage(e.to_string()))?;
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k, v).map_err(|e| usage(e.to_string()))?;
        }
        if let Some(seed) = self.seed {
            cfg.train.seed = seed;
        }
        if let Some(problem) = self.problem {
            cfg.train.problem = problem;
        }
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
