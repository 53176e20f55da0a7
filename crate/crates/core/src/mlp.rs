//! One-hidden-layer feed-forward network with sigmoid units, trained by
//! per-sample gradient descent with momentum on squared error.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{argmax, Classifier, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    /// `None` picks `ceil((n_features + n_classes) / 2)`.
    pub hidden_units: Option<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub seed: u64,
    pub scale_to: (f64, f64),
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_units: None,
            learning_rate: 0.3,
            momentum: 0.2,
            epochs: 500,
            seed: 1,
            scale_to: (-1.0, 1.0),
        }
    }
}

impl MlpConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must be in [0, 1)".into()));
        }
        if self.hidden_units == Some(0) {
            return Err(Error::InvalidConfig("hidden_units must be positive".into()));
        }
        let (lo, hi) = self.scale_to;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidConfig("scale_to must be a finite interval".into()));
        }
        Ok(())
    }

    pub fn hidden_units_for(&self, n_features: usize, n_classes: usize) -> usize {
        self.hidden_units
            .unwrap_or_else(|| (n_features + n_classes).div_ceil(2).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub classes: Vec<String>,
    /// Per-feature `(min, max)` of the training inputs.
    pub scaling: Vec<(f64, f64)>,
    pub scale_to: (f64, f64),
    /// `hidden_units x (n_features + 1)`; the last column is the bias.
    pub w_hidden: Vec<Vec<f64>>,
    /// `n_classes x (hidden_units + 1)`; the last column is the bias.
    pub w_out: Vec<Vec<f64>>,
}

/// Gradient with the same shape as the model's weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub hidden: Vec<Vec<f64>>,
    pub out: Vec<Vec<f64>>,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn dot_with_bias(w: &[f64], x: &[f64]) -> f64 {
    let (bias, weights) = w.split_last().expect("weight row includes a bias");
    weights.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + bias
}

impl MlpModel {
    pub fn n_features(&self) -> usize {
        self.scaling.len()
    }

    pub fn hidden_units(&self) -> usize {
        self.w_hidden.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Min-max scale into `scale_to`; constant features map to the midpoint.
    pub fn scale(&self, x: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.scale_to;
        x.iter()
            .zip(&self.scaling)
            .map(|(&v, &(min, max))| {
                if max > min {
                    lo + (v - min) / (max - min) * (hi - lo)
                } else {
                    (lo + hi) / 2.0
                }
            })
            .collect()
    }

    /// Hidden and output activations for an already scaled input.
    fn forward_scaled(&self, scaled: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let hidden: Vec<f64> = self
            .w_hidden
            .iter()
            .map(|w| sigmoid(dot_with_bias(w, scaled)))
            .collect();
        let out = self
            .w_out
            .iter()
            .map(|w| sigmoid(dot_with_bias(w, &hidden)))
            .collect();
        (hidden, out)
    }

    /// Output activation per class for a raw (unscaled) input.
    pub fn activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.forward_scaled(&self.scale(x)).1)
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.activations(x)?))
    }

    /// Gradient of `0.5 * sum((out - target)^2)` with respect to every weight.
    pub fn gradient(&self, x: &[f64], target: &[f64]) -> Result<Gradient> {
        self.check_dim(x)?;
        if target.len() != self.classes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.classes.len(),
                actual: target.len(),
            });
        }
        let scaled = self.scale(x);
        Ok(self.gradient_scaled(&scaled, target).0)
    }

    /// Gradient plus the sample's loss, for a scaled input.
    fn gradient_scaled(&self, scaled: &[f64], target: &[f64]) -> (Gradient, f64) {
        let (hidden, out) = self.forward_scaled(scaled);
        let mut loss = 0.0;
        let delta_out: Vec<f64> = out
            .iter()
            .zip(target)
            .map(|(&o, &t)| {
                loss += 0.5 * (o - t) * (o - t);
                (o - t) * o * (1.0 - o)
            })
            .collect();

        let grad_out = delta_out
            .iter()
            .map(|&d| {
                let mut row: Vec<f64> = hidden.iter().map(|&h| d * h).collect();
                row.push(d);
                row
            })
            .collect();

        let grad_hidden = hidden
            .iter()
            .enumerate()
            .map(|(j, &h)| {
                let back: f64 = delta_out
                    .iter()
                    .zip(&self.w_out)
                    .map(|(d, w)| d * w[j])
                    .sum();
                let d = back * h * (1.0 - h);
                let mut row: Vec<f64> = scaled.iter().map(|&v| d * v).collect();
                row.push(d);
                row
            })
            .collect();

        (
            Gradient {
                hidden: grad_hidden,
                out: grad_out,
            },
            loss,
        )
    }

    fn weights_finite(&self) -> bool {
        self.w_hidden
            .iter()
            .chain(&self.w_out)
            .flatten()
            .all(|w| w.is_finite())
    }
}

impl Classifier for MlpModel {
    fn n_features(&self) -> usize {
        MlpModel::n_features(self)
    }

    fn predict(&self, x: &[f64]) -> Result<usize> {
        MlpModel::predict(self, x)
    }
}

/// Feature ranges and seeded uniform weights in `[-0.5, 0.5]`; no training.
pub fn initialize(data: &Samples, config: &MlpConfig) -> Result<MlpModel> {
    config.validate()?;
    data.require_all_classes()?;
    let n_in = data.n_features();
    let n_classes = data.n_classes();
    let hidden = config.hidden_units_for(n_in, n_classes);

    let scaling = (0..n_in)
        .map(|j| {
            data.inputs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x[j]), hi.max(x[j]))
            })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut layer = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-0.5..=0.5)).collect())
            .collect()
    };
    let w_hidden = layer(hidden, n_in + 1);
    let w_out = layer(n_classes, hidden + 1);

    Ok(MlpModel {
        classes: data.classes.clone(),
        scaling,
        scale_to: config.scale_to,
        w_hidden,
        w_out,
    })
}

fn apply_update(weights: &mut [Vec<f64>], grad: &[Vec<f64>], velocity: &mut [Vec<f64>], lr: f64, momentum: f64) {
    for ((w_row, g_row), v_row) in weights.iter_mut().zip(grad).zip(velocity.iter_mut()) {
        for ((w, g), v) in w_row.iter_mut().zip(g_row).zip(v_row.iter_mut()) {
            *v = momentum * *v - lr * g;
            *w += *v;
        }
    }
}

pub fn train(data: &Samples, config: &MlpConfig) -> Result<MlpModel> {
    let model = initialize(data, config)?;
    train_from(model, data, config)
}

fn train_from(mut model: MlpModel, data: &Samples, config: &MlpConfig) -> Result<MlpModel> {
    // the shuffle stream is seeded separately from the initial weights
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5EED_5EED_5EED_5EED);

    let scaled: Vec<Vec<f64>> = data.inputs.iter().map(|x| model.scale(x)).collect();
    let targets: Vec<Vec<f64>> = data
        .targets
        .iter()
        .map(|&t| (0..data.n_classes()).map(|c| if c == t { 1.0 } else { 0.0 }).collect())
        .collect();

    let zeros = |m: &[Vec<f64>]| -> Vec<Vec<f64>> { m.iter().map(|r| vec![0.0; r.len()]).collect() };
    let mut vel_hidden = zeros(&model.w_hidden);
    let mut vel_out = zeros(&model.w_out);
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (grad, loss) = model.gradient_scaled(&scaled[i], &targets[i]);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            apply_update(&mut model.w_out, &grad.out, &mut vel_out, config.learning_rate, config.momentum);
            apply_update(&mut model.w_hidden, &grad.hidden, &mut vel_hidden, config.learning_rate, config.momentum);
        }
        if !model.weights_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
    }
    Ok(model)
}
