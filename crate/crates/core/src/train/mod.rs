//! Self-supervised training of the comparator.
//!
//! The current model drives the recursion on dataset graphs; sibling branch
//! pairs from those runs are labelled by roll-out estimates under the same
//! model, and the network is fitted to the labels. The buffer is rebuilt
//! from scratch every `epochs_per_refresh` epochs.

mod buffer;
mod config;
mod consistency;
mod fit;

pub use buffer::{harvest_pairs, refresh_buffer, Buffer, PairOrigin, PairSample};
pub use config::{Selection, TrainConfig};
pub use consistency::{consistency_with, measure_consistency};
pub use fit::{train, write_metrics_csv, MetricsRow, TrainOutcome, METRICS_HEADER};

use thiserror::Error;

use crate::nn::NonFiniteError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training dataset is empty")]
    EmptyDataset,
    #[error("invalid training config: {0}")]
    Config(String),
    #[error(transparent)]
    NonFinite(#[from] NonFiniteError),
    #[error("parameters became non-finite after epoch {epoch}")]
    Diverged { epoch: usize },
}
