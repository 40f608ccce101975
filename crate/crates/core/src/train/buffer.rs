use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::TrainConfig;
use crate::dp::{
    derive_seed, mixed_estimate_for, rollout_estimate_for, solve_mis, solve_mvc, Comparator,
};
use crate::graph::Graph;
use crate::solvers::Problem;

/// Where a pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairOrigin {
    /// Index of the source graph in the dataset.
    pub graph: usize,
    /// Recursion step that produced `g`.
    pub step: usize,
    /// Step that produced `g_prime`; equal to `step` for sibling pairs.
    pub partner_step: usize,
}

/// A self-annotated training pair. `label` says `g_prime` is the better
/// instance according to the estimates.
#[derive(Debug, Clone)]
pub struct PairSample {
    pub g: Graph,
    pub g_prime: Graph,
    pub label: bool,
    pub est_g: usize,
    pub est_gp: usize,
    pub origin: PairOrigin,
}

impl PairSample {
    pub fn new(
        problem: Problem,
        g: Graph,
        g_prime: Graph,
        est_g: usize,
        est_gp: usize,
        origin: PairOrigin,
    ) -> Self {
        Self {
            label: problem.better(est_gp, est_g),
            g,
            g_prime,
            est_g,
            est_gp,
            origin,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Buffer {
    pub train: Vec<PairSample>,
    pub validation: Vec<PairSample>,
    /// Upper bound on sibling pairs per refresh.
    pub capacity: usize,
}

impl Buffer {
    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &PairSample> {
        self.train.iter().chain(&self.validation)
    }

    /// True when every pair carries the same label, which leaves nothing to
    /// learn.
    pub fn is_degenerate(&self) -> bool {
        let mut labels = self.iter().map(|s| s.label);
        match labels.next() {
            None => true,
            Some(first) => labels.all(|l| l == first),
        }
    }
}

fn estimate<C: Comparator + ?Sized>(cfg: &TrainConfig, g: &Graph, cmp: &C, seed: u64) -> usize {
    if cfg.mixed {
        mixed_estimate_for(cfg.problem, g, cmp, cfg.m, seed)
    } else {
        rollout_estimate_for(cfg.problem, g, cmp, cfg.m, seed)
    }
}

/// Runs the recursion on `g_init` and labels up to `pairs_per_graph` of its
/// sibling branch pairs, chosen uniformly among the steps.
pub fn harvest_pairs<C: Comparator + ?Sized>(
    g_init: &Graph,
    cmp: &C,
    cfg: &TrainConfig,
    seed: u64,
) -> Vec<PairSample> {
    harvest_indexed(0, g_init, cmp, cfg, seed)
}

fn harvest_indexed<C: Comparator + ?Sized>(
    graph_index: usize,
    g_init: &Graph,
    cmp: &C,
    cfg: &TrainConfig,
    seed: u64,
) -> Vec<PairSample> {
    let (_, trajectory) = match cfg.problem {
        Problem::Mis => solve_mis(g_init, cmp, derive_seed(seed, 0)),
        Problem::Mvc => solve_mvc(g_init, cmp, derive_seed(seed, 0)),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
    let take = cfg.pairs_per_graph.min(trajectory.len());
    let mut picked = rand::seq::index::sample(&mut rng, trajectory.len(), take).into_vec();
    picked.sort_unstable();

    let mut out = Vec::with_capacity(take);
    for (k, step_index) in picked.into_iter().enumerate() {
        let step = &trajectory.steps[step_index];
        let base = derive_seed(seed, 2 + 2 * k as u64);
        let est_g = estimate(cfg, &step.branch0, cmp, base);
        let est_gp = estimate(cfg, &step.branch1, cmp, derive_seed(base, 1));
        if cfg.drop_ties && est_g == est_gp {
            continue;
        }
        let origin = PairOrigin {
            graph: graph_index,
            step: step_index,
            partner_step: step_index,
        };
        out.push(PairSample::new(
            cfg.problem,
            step.branch0.clone(),
            step.branch1.clone(),
            est_g,
            est_gp,
            origin,
        ));
    }
    out
}

/// Indices of `count` dataset graphs: a fresh shuffle per pass over the data.
fn pick_graphs(len: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    let mut order: Vec<usize> = (0..len).collect();
    while out.len() < count {
        order.shuffle(rng);
        out.extend(order.iter().take(count - out.len()));
    }
    out
}

/// Builds a fresh buffer from `graphs_per_refresh` dataset graphs and splits
/// it into train and validation parts.
pub fn refresh_buffer<C: Comparator + ?Sized>(
    dataset: &[Graph],
    cmp: &C,
    cfg: &TrainConfig,
    seed: u64,
) -> Buffer {
    let capacity = cfg.graphs_per_refresh * cfg.pairs_per_graph;
    if dataset.is_empty() {
        return Buffer {
            capacity,
            ..Buffer::default()
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = pick_graphs(dataset.len(), cfg.graphs_per_refresh, &mut rng);
    let harvest = |(i, &gi): (usize, &usize)| {
        harvest_indexed(gi, &dataset[gi], cmp, cfg, derive_seed(seed, i as u64))
    };
    let per_graph: Vec<Vec<PairSample>> = if cfg.deterministic {
        chosen.iter().enumerate().map(harvest).collect()
    } else {
        chosen.par_iter().enumerate().map(harvest).collect()
    };
    let mut samples: Vec<PairSample> = per_graph.into_iter().flatten().collect();
    if cfg.cross_pairs {
        let crossed = cross_pairs(&samples, cfg, &mut rng);
        samples.extend(crossed);
    }

    samples.shuffle(&mut rng);
    let n_val = (cfg.val_fraction * samples.len() as f64).round() as usize;
    let train = samples.split_off(n_val);
    Buffer {
        train,
        validation: samples,
        capacity,
    }
}

/// Pairs each sample's first graph with the second graph of a sample from a
/// different source graph, reusing the stored estimates.
fn cross_pairs(samples: &[PairSample], cfg: &TrainConfig, rng: &mut ChaCha8Rng) -> Vec<PairSample> {
    let mut out = Vec::new();
    for s in samples {
        let partners: Vec<&PairSample> = samples
            .iter()
            .filter(|o| o.origin.graph != s.origin.graph)
            .collect();
        if partners.is_empty() {
            break;
        }
        let o = partners[rng.gen_range(0..partners.len())];
        if cfg.drop_ties && s.est_g == o.est_gp {
            continue;
        }
        let origin = PairOrigin {
            partner_step: o.origin.step,
            ..s.origin
        };
        out.push(PairSample::new(
            cfg.problem,
            s.g.clone(),
            o.g_prime.clone(),
            s.est_g,
            o.est_gp,
            origin,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{FnComparator, OracleComparator, RandomComparator};
    use crate::graph::{generate, GenSpec, GraphModel};

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            graphs_per_refresh: 2,
            pairs_per_graph: 3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn edgeless_graph_gives_no_pairs() {
        assert!(harvest_pairs(&Graph::empty(6), &RandomComparator, &small_cfg(), 0).is_empty());
    }

    #[test]
    fn triangle_gives_one_tied_pair() {
        // Following G1 ends the recursion after the first step.
        let to_g1 = FnComparator(|_: &Graph, _: &Graph| true);
        let pairs = harvest_pairs(&Graph::complete(3), &to_g1, &small_cfg(), 0);
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!((p.g.n(), p.g.m()), (2, 1));
        assert_eq!((p.g_prime.n(), p.g_prime.m()), (1, 0));
        assert_eq!((p.est_g, p.est_gp), (1, 1));
        assert!(!p.label);
        let cfg = TrainConfig {
            drop_ties: true,
            ..small_cfg()
        };
        assert!(harvest_pairs(&Graph::complete(3), &to_g1, &cfg, 0).is_empty());
    }

    #[test]
    fn pair_budget_per_graph() {
        let g = Graph::path(12);
        let cfg = TrainConfig {
            pairs_per_graph: 1,
            ..small_cfg()
        };
        assert_eq!(harvest_pairs(&g, &RandomComparator, &cfg, 4).len(), 1);
    }

    #[test]
    fn refresh_is_bounded_split_and_repeatable() {
        let data: Vec<Graph> = (0..5)
            .map(|s| generate(&GenSpec::new(GraphModel::ErdosRenyi { n: 12, p: 0.3 }, s)).unwrap())
            .collect();
        let cfg = small_cfg();
        let a = refresh_buffer(&data, &RandomComparator, &cfg, 9);
        let b = refresh_buffer(&data, &RandomComparator, &cfg, 9);
        assert!(a.len() <= 6);
        assert_eq!(a.validation.len(), (0.2 * a.len() as f64).round() as usize);
        let key = |buf: &Buffer| {
            buf.iter()
                .map(|s| (s.g.clone(), s.g_prime.clone(), s.label))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
        for s in a.iter() {
            assert_eq!(s.label, s.est_g < s.est_gp);
        }
    }

    #[test]
    fn oracle_labels_mvc_orientation() {
        let cfg = TrainConfig {
            problem: Problem::Mvc,
            ..small_cfg()
        };
        let g = Graph::cycle(6);
        for s in harvest_pairs(&g, &OracleComparator::new(Problem::Mvc), &cfg, 2) {
            assert_eq!(s.label, s.est_gp < s.est_g);
        }
    }

    #[test]
    fn cross_pairs_mix_sources() {
        let data: Vec<Graph> = (0..4).map(|i| Graph::cycle(7 + i)).collect();
        let cfg = TrainConfig {
            cross_pairs: true,
            val_fraction: 0.0,
            graphs_per_refresh: 4,
            ..small_cfg()
        };
        let crossed = refresh_buffer(&data, &RandomComparator, &cfg, 1);
        let plain = refresh_buffer(
            &data,
            &RandomComparator,
            &TrainConfig {
                cross_pairs: false,
                ..cfg
            },
            1,
        );
        assert_eq!(crossed.len(), 2 * plain.len());
        for s in crossed.iter() {
            assert_eq!(s.label, s.est_g < s.est_gp);
        }
    }
}
