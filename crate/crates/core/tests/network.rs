//! Forward/backward checks for the scoring network against independent
//! oracles: a naive forward pass with explicit O(n^2) non-neighbour sums,
//! and central finite differences.

use cmpdp::graph::{generate, GenSpec, Graph, GraphModel};
use cmpdp::nn::{pair_loss, pair_loss_and_grad, score, score_graph, Geometry, Params};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// erf by composite Simpson quadrature of the Gaussian density.
fn erf_by_quadrature(x: f64) -> f64 {
    let a = x.abs().min(10.0);
    let steps = 4000;
    let h = a / steps as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(0.0) + f(a);
    for i in 1..steps {
        let t = i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
    }
    (s * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()).copysign(x)
}

fn naive_gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + erf_by_quadrature(x / 2f64.sqrt()))
}

fn naive_ln(x: &[f64], gamma: &[f64], beta: &[f64]) -> Vec<f64> {
    let d = x.len() as f64;
    let mean = x.iter().sum::<f64>() / d;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / d;
    x.iter()
        .enumerate()
        .map(|(i, v)| gamma[i] * (v - mean) / (var + 1e-5).sqrt() + beta[i])
        .collect()
}

fn matvec(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let cols = x.len();
    (0..b.len())
        .map(|o| b[o] + (0..cols).map(|i| w[o * cols + i] * x[i]).sum::<f64>())
        .collect()
}

/// Straight-line forward pass: explicit non-neighbour loop, no shared code
/// with the library implementation.
fn naive_score(p: &Params<f64>, g: &Graph) -> f64 {
    let n = g.n();
    let e = 3 * p.geometry().p;
    let mut mu = vec![vec![0.0; e]; n];
    for layer in &p.gem {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut s = vec![0.0; e];
            let mut t = vec![0.0; e];
            for u in 0..n {
                if u == v {
                    continue;
                }
                let target = if g.has_edge(u, v) { &mut s } else { &mut t };
                for i in 0..e {
                    target[i] += mu[u][i];
                }
            }
            let mut cat = matvec(&layer.self_proj.weight, &layer.self_proj.bias, &mu[v]);
            cat.extend(matvec(&layer.nbr_proj.weight, &layer.nbr_proj.bias, &s));
            cat.extend(matvec(&layer.anti_proj.weight, &layer.anti_proj.bias, &t));
            let act: Vec<f64> = cat.into_iter().map(naive_gelu).collect();
            next.push(naive_ln(&act, &layer.norm.gamma, &layer.norm.beta));
        }
        mu = next;
    }
    let pooled: Vec<f64> = (0..e)
        .map(|i| mu.iter().map(|row| row[i]).sum::<f64>() / n as f64)
        .collect();
    let mut hs = Vec::new();
    let mut x = pooled;
    for h in &p.hidden {
        let pre = matvec(&h.linear.weight, &h.linear.bias, &x);
        let act: Vec<f64> = pre.into_iter().map(naive_gelu).collect();
        x = naive_ln(&act, &h.norm.gamma, &h.norm.beta);
        hs.push(x.clone());
    }
    let mut z = hs.last().unwrap().clone();
    z.extend_from_slice(&hs[0]);
    matvec(&p.output.weight, &p.output.bias, &z)[0]
}

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(0.1..0.7);
    generate(&GenSpec::new(GraphModel::ErdosRenyi { n, p }, rng.gen())).unwrap()
}

#[test]
fn forward_matches_naive_reimplementation() {
    let p = Params::<f64>::init(Geometry::default(), 0);
    let k3 = Graph::complete(3);
    let p3 = Graph::path(3);
    let (a, b) = (score(&p, &k3), score(&p, &p3));
    let (na, nb) = (naive_score(&p, &k3), naive_score(&p, &p3));
    assert!((a - na).abs() < 1e-9, "K3: {a} vs {na}");
    assert!((b - nb).abs() < 1e-9, "P3: {b} vs {nb}");
    assert_ne!(a, b);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let params = Params::<f64>::init(Geometry::new(2, 4, 3).unwrap(), rng.gen());
        let g = random_graph(&mut rng, 10);
        let (x, y) = (score(&params, &g), naive_score(&params, &g));
        assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "{x} vs {y}");
    }
}

#[test]
fn seed_zero_logits_are_reproducible() {
    let p = Params::<f64>::init(Geometry::default(), 0);
    let again = Params::<f64>::init(Geometry::default(), 0);
    for g in [Graph::complete(3), Graph::path(3)] {
        assert_eq!(score(&p, &g).to_bits(), score(&again, &g).to_bits());
    }
}

/// Relative error with a floor so that components that are zero in both
/// routes count as agreeing.
fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-12 {
        (a - b).abs() / 1e-12_f64.max(scale)
    } else {
        (a - b).abs() / scale
    }
}

fn gradient_agreement(seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geo = Geometry::new(3, 4, 4).unwrap();
    let params = Params::<f64>::init(geo, rng.gen());
    let g1 = random_graph(&mut rng, 8);
    let g2 = random_graph(&mut rng, 8);
    let label = rng.gen_bool(0.5);
    let (_, grads) = pair_loss_and_grad(&params, &g1, &g2, label).unwrap();
    let analytic = grads.flatten();
    let h = 1e-5;
    let mut ok = 0;
    let mut idx = 0;
    let n_tensors = params.tensors().len();
    for t in 0..n_tensors {
        let len = params.tensors()[t].1.len();
        for i in 0..len {
            let mut plus = params.clone();
            plus.tensors_mut()[t][i] += h;
            let mut minus = params.clone();
            minus.tensors_mut()[t][i] -= h;
            let fd = (pair_loss(&plus, &g1, &g2, label) - pair_loss(&minus, &g1, &g2, label))
                / (2.0 * h);
            if rel_err(analytic[idx], fd) <= 1e-4 {
                ok += 1;
            }
            idx += 1;
        }
    }
    (ok, idx)
}

#[test]
fn gradients_match_finite_differences() {
    let mut ok = 0;
    let mut total = 0;
    for seed in 0..4 {
        let (a, b) = gradient_agreement(seed);
        ok += a;
        total += b;
    }
    let frac = ok as f64 / total as f64;
    assert!(frac >= 0.99, "only {ok}/{total} components agree");
}

#[test]
fn minimal_geometry_gradients() {
    let geo = Geometry::new(1, 2, 2).unwrap();
    let params = Params::<f64>::init(geo, 3);
    let (g1, g2) = (Graph::path(4), Graph::cycle(5));
    let (_, grads) = pair_loss_and_grad(&params, &g1, &g2, true).unwrap();
    let analytic = grads.flatten();
    let h = 1e-5;
    let mut idx = 0;
    for t in 0..params.tensors().len() {
        for i in 0..params.tensors()[t].1.len() {
            let mut plus = params.clone();
            plus.tensors_mut()[t][i] += h;
            let mut minus = params.clone();
            minus.tensors_mut()[t][i] -= h;
            let fd =
                (pair_loss(&plus, &g1, &g2, true) - pair_loss(&minus, &g1, &g2, true)) / (2.0 * h);
            assert!(
                (analytic[idx] - fd).abs() < 1e-7,
                "component {idx}: {} vs {fd}",
                analytic[idx]
            );
            idx += 1;
        }
    }
}

#[test]
fn trace_exposes_pipeline_stages() {
    let p = Params::<f64>::init(Geometry::new(2, 3, 3).unwrap(), 1);
    let (logit, trace) = score_graph(&p, &Graph::star(3));
    assert_eq!(trace.num_vertices(), 4);
    assert_eq!(trace.embeddings.len(), 3);
    assert_eq!(trace.pooled.len(), 9);
    assert_eq!(trace.logit, logit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn logit_is_permutation_invariant(seed in any::<u64>(), n in 1usize..12, density in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate(&GenSpec::new(GraphModel::ErdosRenyi { n, p: density }, seed)).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let params = Params::<f64>::init(Geometry::new(3, 8, 4).unwrap(), seed ^ 0x5a5a);
        let a = score(&params, &g);
        let b = score(&params, &g.permuted(&perm));
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()));
    }

    #[test]
    fn zero_params_always_score_zero(seed in any::<u64>(), n in 0usize..10) {
        let g = generate(&GenSpec::new(GraphModel::ErdosRenyi { n: n.max(1), p: 0.4 }, seed)).unwrap();
        let z = Params::<f64>::zeros(Geometry::new(2, 4, 3).unwrap());
        prop_assert_eq!(score(&z, &g), 0.0);
    }
}
