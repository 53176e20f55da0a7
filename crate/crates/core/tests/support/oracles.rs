//! Reference computations written independently of the library code paths
//! they check, plus seeded generators for random models and datasets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spambehave::learner::Learner;
use spambehave::selection::evaluate_subset;
use spambehave::{AnyLearner, AnyModel, MlpConfig, MlpModel, NbConfig, NbModel, Samples};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn two_classes() -> Vec<String> {
    vec!["spam".into(), "ham".into()]
}

/// Posterior straight from Bayes' rule: prior times the product of normal
/// densities, divided by the sum over classes. No logs.
pub fn nb_product_posterior(m: &NbModel, x: &[f64]) -> Vec<f64> {
    let joint: Vec<f64> = (0..m.classes.len())
        .map(|c| {
            let mut p = m.priors[c];
            for j in 0..x.len() {
                let (mu, var) = (m.means[c][j], m.variances[c][j]);
                p *= (-(x[j] - mu).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            }
            p
        })
        .collect();
    let evidence: f64 = joint.iter().sum();
    joint.iter().map(|p| p / evidence).collect()
}

/// A small NB model whose densities stay far from underflow, and an input.
pub fn random_nb_case(r: &mut ChaCha8Rng) -> (NbModel, Vec<f64>) {
    let n_classes = r.gen_range(2..=4);
    let dim = r.gen_range(1..=6);
    let raw: Vec<f64> = (0..n_classes).map(|_| r.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let priors = raw.iter().map(|p| p / total).collect();
    let means: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..dim).map(|_| r.gen_range(-3.0..3.0)).collect())
        .collect();
    let variances = (0..n_classes)
        .map(|_| (0..dim).map(|_| r.gen_range(0.2..4.0)).collect())
        .collect();
    let x = (0..dim).map(|_| r.gen_range(-4.0..4.0)).collect();
    let classes = (0..n_classes).map(|c| format!("c{c}")).collect();
    (NbModel::from_parts(classes, priors, means, variances).unwrap(), x)
}

pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// A network with identity scaling (inputs already in `[0, 1]`), random
/// weights, an input and a one-hot target.
pub fn random_mlp_case(r: &mut ChaCha8Rng) -> (MlpModel, Vec<f64>, Vec<f64>) {
    let n_in = r.gen_range(1..=6);
    let hidden = r.gen_range(1..=5);
    let n_classes = r.gen_range(2..=3);
    let mut layer = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| r.gen_range(-2.0..2.0)).collect())
            .collect()
    };
    let w_hidden = layer(hidden, n_in + 1);
    let w_out = layer(n_classes, hidden + 1);
    let model = MlpModel {
        classes: (0..n_classes).map(|c| format!("c{c}")).collect(),
        scaling: vec![(0.0, 1.0); n_in],
        scale_to: (0.0, 1.0),
        w_hidden,
        w_out,
    };
    let x = (0..n_in).map(|_| r.gen_range(0.0..1.0)).collect();
    let target_class = r.gen_range(0..n_classes);
    let t = (0..n_classes).map(|c| if c == target_class { 1.0 } else { 0.0 }).collect();
    (model, x, t)
}

fn squared_error(m: &MlpModel, x: &[f64], t: &[f64]) -> f64 {
    let out = m.activations(x).unwrap();
    out.iter().zip(t).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
}

fn weight_mut(m: &mut MlpModel, layer: usize, i: usize, j: usize) -> &mut f64 {
    if layer == 0 {
        &mut m.w_hidden[i][j]
    } else {
        &mut m.w_out[i][j]
    }
}

/// Central differences of the squared error for every weight, flattened
/// hidden-layer first, row by row.
pub fn numeric_gradient(m: &MlpModel, x: &[f64], t: &[f64], h: f64) -> Vec<f64> {
    let mut grads = Vec::new();
    let mut probe = m.clone();
    for (layer, rows) in [&m.w_hidden, &m.w_out].into_iter().enumerate() {
        for (i, row) in rows.iter().enumerate() {
            for (j, &orig) in row.iter().enumerate() {
                *weight_mut(&mut probe, layer, i, j) = orig + h;
                let up = squared_error(&probe, x, t);
                *weight_mut(&mut probe, layer, i, j) = orig - h;
                let down = squared_error(&probe, x, t);
                *weight_mut(&mut probe, layer, i, j) = orig;
                grads.push((up - down) / (2.0 * h));
            }
        }
    }
    grads
}

/// `|a - b| / max(|a|, |b|)` over whole vectors; 0 when both are negligible.
pub fn norm_relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let diff = norm(&mut a.iter().zip(b).map(|(x, y)| x - y));
    let scale = norm(&mut a.iter().copied()).max(norm(&mut b.iter().copied()));
    if scale < 1e-12 {
        0.0
    } else {
        diff / scale
    }
}

/// Balanced two-class data: the first `informative` columns shift with the
/// label by a random amount, the rest are noise.
pub fn random_dataset(r: &mut ChaCha8Rng, n_per_class: usize, n_features: usize, informative: usize) -> Samples {
    let shifts: Vec<f64> = (0..n_features)
        .map(|j| if j < informative { r.gen_range(0.5..2.5) } else { 0.0 })
        .collect();
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for class in 0..2 {
        for _ in 0..n_per_class {
            inputs.push(
                shifts
                    .iter()
                    .map(|s| r.gen_range(-1.0..1.0) + if class == 0 { *s } else { 0.0 })
                    .collect(),
            );
            targets.push(class);
        }
    }
    Samples::new(two_classes(), inputs, targets).unwrap()
}

/// Best merit over every subset of columns, the empty set (majority rate) included.
pub fn exhaustive_best_merit<L: Learner>(data: &Samples, learner: &L, k: usize, seed: u64) -> f64 {
    let n = data.n_features();
    let counts = data.class_counts();
    let mut best = *counts.iter().max().unwrap() as f64 / data.len() as f64;
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| j + 1).collect();
        best = best.max(evaluate_subset(data, &subset, learner, k, seed).unwrap());
    }
    best
}

/// A trained model of either kind on random data, with its training dimension.
pub fn random_model(r: &mut ChaCha8Rng) -> (AnyModel, usize) {
    let dim = r.gen_range(1..=8);
    let (per_class, informative) = (r.gen_range(5..=15), r.gen_range(0..=dim));
    let data = random_dataset(r, per_class, dim, informative);
    let learner = if r.gen_bool(0.5) {
        AnyLearner::NaiveBayes(NbConfig::default())
    } else {
        AnyLearner::Mlp(MlpConfig {
            epochs: r.gen_range(1..=30),
            seed: r.gen(),
            ..MlpConfig::default()
        })
    };
    (learner.fit(&data).unwrap(), dim)
}
