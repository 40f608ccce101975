use crate::nn::Geometry;
use crate::solvers::Problem;

/// Which parameters `train` hands back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Lowest validation loss seen at any epoch.
    #[default]
    BestValidation,
    /// Parameters after the final epoch.
    Last,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub problem: Problem,
    pub total_epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Roll-outs per estimate.
    pub m: usize,
    /// Floor roll-out estimates with the greedy heuristic.
    pub mixed: bool,
    pub graphs_per_refresh: usize,
    pub pairs_per_graph: usize,
    pub epochs_per_refresh: usize,
    pub val_fraction: f64,
    /// Drop pairs whose estimates tie instead of labelling them 0.
    pub drop_ties: bool,
    /// Also pair graphs drawn from different trajectories.
    pub cross_pairs: bool,
    /// Run harvesting and gradients sequentially.
    pub deterministic: bool,
    pub selection: Selection,
    pub geometry: Geometry,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Mis,
            total_epochs: 300,
            batch_size: 32,
            lr: 0.001,
            m: 3,
            mixed: false,
            graphs_per_refresh: 32,
            pairs_per_graph: 8,
            epochs_per_refresh: 10,
            val_fraction: 0.2,
            drop_ties: false,
            cross_pairs: false,
            deterministic: false,
            selection: Selection::BestValidation,
            geometry: Geometry::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Names the first offending field.
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("batch_size", self.batch_size),
            ("m", self.m),
            ("graphs_per_refresh", self.graphs_per_refresh),
            ("pairs_per_graph", self.pairs_per_graph),
            ("epochs_per_refresh", self.epochs_per_refresh),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(format!("lr must be a positive number, got {}", self.lr));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(format!(
                "val_fraction must lie in [0, 1), got {}",
                self.val_fraction
            ));
        }
        Ok(())
    }
}
