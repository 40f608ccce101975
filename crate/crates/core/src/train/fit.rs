use std::io::{self, Write};
use std::time::Instant;

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    measure_consistency, refresh_buffer, Buffer, PairSample, Selection, TrainConfig, TrainError,
};
use crate::dp::{derive_seed, LearnedComparator};
use crate::graph::Graph;
use crate::nn::{
    accumulate_pair_grad, adam_step, compare, pair_loss, AdamConfig, AdamState, Params, Scalar,
};

/// Pairs per gradient task; fixed so the summation order never depends on
/// the thread count.
const GRAD_CHUNK: usize = 4;

pub const METRICS_HEADER: &str =
    "epoch,refresh_index,train_loss,val_loss,val_pair_accuracy,consistency,wall_seconds";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub epoch: usize,
    pub refresh_index: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_pair_accuracy: f64,
    pub consistency: f64,
    pub wall_seconds: f64,
}

impl MetricsRow {
    pub fn is_finite(&self) -> bool {
        [
            self.train_loss,
            self.val_loss,
            self.val_pair_accuracy,
            self.consistency,
            self.wall_seconds,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.3}",
            r.epoch,
            r.refresh_index,
            r.train_loss,
            r.val_loss,
            r.val_pair_accuracy,
            r.consistency,
            r.wall_seconds
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    /// Parameters chosen by the configured selection rule.
    pub params: Params<T>,
    pub final_params: Params<T>,
    /// Epoch the returned parameters come from; 0 means the initialisation.
    pub selected_epoch: usize,
    /// Row 0 is the untrained model; row `e` follows epoch `e`.
    pub metrics: Vec<MetricsRow>,
}

impl<T> TrainOutcome<T> {
    pub fn initial_consistency(&self) -> Option<f64> {
        self.metrics.first().map(|r| r.consistency)
    }

    pub fn final_consistency(&self) -> Option<f64> {
        self.metrics.last().map(|r| r.consistency)
    }
}

/// Mean loss and pair accuracy; an empty split scores as a perfect one.
fn evaluate<T: Scalar>(params: &Params<T>, pairs: &[PairSample], sequential: bool) -> (f64, f64) {
    if pairs.is_empty() {
        return (0.0, 1.0);
    }
    let one = |s: &PairSample| {
        let loss = pair_loss(params, &s.g, &s.g_prime, s.label).to_f64_exact();
        let hit = compare(params, &s.g, &s.g_prime) == s.label;
        (loss, usize::from(hit))
    };
    let parts: Vec<(f64, usize)> = if sequential {
        pairs.iter().map(one).collect()
    } else {
        pairs.par_iter().map(one).collect()
    };
    let loss: f64 = parts.iter().map(|p| p.0).sum();
    let hits: usize = parts.iter().map(|p| p.1).sum();
    let n = pairs.len() as f64;
    (loss / n, hits as f64 / n)
}

/// Mean loss over `batch` and the summed gradient, scaled to the mean.
fn batch_gradient<T: Scalar>(
    params: &Params<T>,
    batch: &[&PairSample],
    sequential: bool,
) -> Result<(f64, Params<T>), TrainError> {
    let chunk = |part: &[&PairSample]| -> Result<(f64, Params<T>), TrainError> {
        let mut grads = Params::zeros(params.geometry());
        let mut loss = 0.0;
        for s in part {
            loss +=
                accumulate_pair_grad(params, &s.g, &s.g_prime, s.label, &mut grads)?.to_f64_exact();
        }
        Ok((loss, grads))
    };
    let parts: Vec<Result<(f64, Params<T>), TrainError>> = if sequential {
        batch.chunks(GRAD_CHUNK).map(chunk).collect()
    } else {
        batch.par_chunks(GRAD_CHUNK).map(chunk).collect()
    };
    let mut total = Params::zeros(params.geometry());
    let mut loss = 0.0;
    for part in parts {
        let (l, g) = part?;
        loss += l;
        total.add_scaled(&g, T::one());
    }
    let n = batch.len() as f64;
    total.scale(T::lit(1.0 / n));
    Ok((loss / n, total))
}

fn probe_pairs(buffer: &Buffer) -> Vec<(Graph, Graph)> {
    let source = if buffer.validation.is_empty() {
        &buffer.train
    } else {
        &buffer.validation
    };
    source
        .iter()
        .map(|s| (s.g.clone(), s.g_prime.clone()))
        .collect()
}

/// Self-training loop: refresh the pair buffer with the current model every
/// `epochs_per_refresh` epochs and fit the pair loss with mini-batch Adam.
///
/// Consistency is measured on a fixed probe set (the validation pairs of the
/// first buffer) at initialisation, after each refresh and after the last
/// epoch; rows in between repeat the latest measurement.
pub fn train<T: Scalar>(
    dataset: &[Graph],
    cfg: &TrainConfig,
) -> Result<TrainOutcome<T>, TrainError> {
    cfg.validate().map_err(TrainError::Config)?;
    if dataset.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let start = Instant::now();
    let mut params = Params::<T>::init(cfg.geometry, cfg.seed);
    if cfg.total_epochs == 0 {
        return Ok(TrainOutcome {
            final_params: params.clone(),
            params,
            selected_epoch: 0,
            metrics: Vec::new(),
        });
    }
    let sequential = cfg.deterministic;
    let mut adam = AdamState::new(&params, AdamConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0));
    let consistency_seed = derive_seed(cfg.seed, 1);
    let probe_consistency = |params: &Params<T>, probe: &[(Graph, Graph)]| {
        measure_consistency(
            params,
            probe.iter().map(|(a, b)| (a, b)),
            cfg.problem,
            cfg.m,
            consistency_seed,
        )
    };

    let mut refresh_index = 0;
    let mut buffer = refresh(dataset, &params, cfg, refresh_index);
    let probe = probe_pairs(&buffer);
    let mut consistency = probe_consistency(&params, &probe);

    let (train_loss, _) = evaluate(&params, &buffer.train, sequential);
    let (val_loss, val_acc) = evaluate(&params, &buffer.validation, sequential);
    let mut metrics = vec![MetricsRow {
        epoch: 0,
        refresh_index,
        train_loss,
        val_loss,
        val_pair_accuracy: val_acc,
        consistency,
        wall_seconds: start.elapsed().as_secs_f64(),
    }];
    let mut best = (val_loss, 0, params.clone());

    for epoch in 1..=cfg.total_epochs {
        if epoch > 1 && (epoch - 1) % cfg.epochs_per_refresh == 0 {
            refresh_index += 1;
            buffer = refresh(dataset, &params, cfg, refresh_index);
            consistency = probe_consistency(&params, &probe);
        }

        let mut order: Vec<&PairSample> = buffer.train.iter().collect();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (loss, grads) = batch_gradient(&params, batch, sequential)?;
            adam_step(&mut params, &grads, &mut adam, cfg.lr);
            loss_sum += loss * batch.len() as f64;
        }
        let train_loss = if order.is_empty() {
            0.0
        } else {
            loss_sum / order.len() as f64
        };
        if !params.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }

        let (val_loss, val_acc) = if buffer.validation.is_empty() {
            evaluate(&params, &buffer.train, sequential)
        } else {
            evaluate(&params, &buffer.validation, sequential)
        };
        if epoch == cfg.total_epochs {
            consistency = probe_consistency(&params, &probe);
        }
        let row = MetricsRow {
            epoch,
            refresh_index,
            train_loss,
            val_loss,
            val_pair_accuracy: val_acc,
            consistency,
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        info!(
            "epoch {epoch} refresh {refresh_index}: train {train_loss:.4} val {val_loss:.4} acc {val_acc:.3} cons {consistency:.3}"
        );
        metrics.push(row);
        if val_loss < best.0 {
            best = (val_loss, epoch, params.clone());
        }
    }

    let (selected_epoch, chosen) = match cfg.selection {
        Selection::BestValidation => (best.1, best.2),
        Selection::Last => (cfg.total_epochs, params.clone()),
    };
    Ok(TrainOutcome {
        params: chosen,
        final_params: params,
        selected_epoch,
        metrics,
    })
}

fn refresh<T: Scalar>(
    dataset: &[Graph],
    params: &Params<T>,
    cfg: &TrainConfig,
    index: usize,
) -> Buffer {
    let cmp = LearnedComparator::new(params);
    let buffer = refresh_buffer(
        dataset,
        &cmp,
        cfg,
        derive_seed(cfg.seed, 100 + index as u64),
    );
    if buffer.is_degenerate() {
        warn!(
            "refresh {index}: all {} pairs carry the same label; the loss gives no ordering signal",
            buffer.len()
        );
    }
    buffer
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Geometry;

    fn tiny_cfg() -> TrainConfig {
        TrainConfig {
            total_epochs: 3,
            epochs_per_refresh: 2,
            graphs_per_refresh: 3,
            pairs_per_graph: 3,
            batch_size: 4,
            m: 1,
            geometry: Geometry::new(1, 4, 2).unwrap(),
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_init() {
        let cfg = TrainConfig {
            total_epochs: 0,
            ..tiny_cfg()
        };
        let out = train::<f64>(&[Graph::cycle(5)], &cfg).unwrap();
        assert!(out.metrics.is_empty());
        assert_eq!(out.params, Params::init(cfg.geometry, cfg.seed));
    }

    #[test]
    fn rejects_empty_dataset_and_bad_config() {
        assert!(matches!(
            train::<f64>(&[], &tiny_cfg()),
            Err(TrainError::EmptyDataset)
        ));
        let bad = TrainConfig {
            batch_size: 0,
            ..tiny_cfg()
        };
        let err = train::<f64>(&[Graph::cycle(5)], &bad).unwrap_err();
        assert!(err.to_string().contains("batch_size"));
    }

    #[test]
    fn metrics_rows_are_ordered_and_finite() {
        let data: Vec<Graph> = (5..9).map(Graph::cycle).collect();
        let out = train::<f64>(&data, &tiny_cfg()).unwrap();
        assert_eq!(out.metrics.len(), 4);
        for (i, r) in out.metrics.iter().enumerate() {
            assert_eq!(r.epoch, i);
            assert!(r.is_finite());
        }
        assert_eq!(out.metrics.last().unwrap().refresh_index, 1);
        let mut csv = Vec::new();
        write_metrics_csv(&out.metrics, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().next(), Some(METRICS_HEADER));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn deterministic_flag_matches_parallel() {
        let data: Vec<Graph> = (6..10).map(Graph::cycle).collect();
        let a = train::<f64>(&data, &tiny_cfg()).unwrap();
        let cfg = TrainConfig {
            deterministic: true,
            ..tiny_cfg()
        };
        let b = train::<f64>(&data, &cfg).unwrap();
        assert_eq!(a.final_params, b.final_params);
    }

    #[test]
    fn single_step_lowers_pair_loss() {
        let params = Params::<f64>::init(Geometry::new(2, 4, 3).unwrap(), 5);
        let s = PairSample::new(
            crate::solvers::Problem::Mis,
            Graph::complete(4),
            Graph::empty(4),
            1,
            4,
            super::super::PairOrigin {
                graph: 0,
                step: 0,
                partner_step: 0,
            },
        );
        let before = pair_loss(&params, &s.g, &s.g_prime, s.label);
        let (_, grads) = batch_gradient(&params, &[&s], true).unwrap();
        let mut after = params.clone();
        after.add_scaled(&grads, -1e-3);
        assert!(pair_loss(&after, &s.g, &s.g_prime, s.label) < before);
    }
}
