//! Gaussian naive Bayes over numeric feature vectors.
//!
//! Each class gets a prior and, per feature, an independent normal density.
//! Scoring is done in log space and normalized with log-sum-exp, so 21
//! narrow densities multiply without underflow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{argmax, Classifier, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbConfig {
    pub variance_floor: f64,
    pub prior_smoothing: f64,
}

impl Default for NbConfig {
    fn default() -> Self {
        NbConfig {
            variance_floor: 1e-6,
            prior_smoothing: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub classes: Vec<String>,
    pub priors: Vec<f64>,
    /// `means[class][feature]`
    pub means: Vec<Vec<f64>>,
    /// `variances[class][feature]`, each at least the fit-time floor.
    pub variances: Vec<Vec<f64>>,
    pub feature_count: usize,
}

pub fn fit(data: &Samples, config: &NbConfig) -> Result<NbModel> {
    if !(config.variance_floor > 0.0) {
        return Err(Error::InvalidConfig("variance_floor must be > 0".into()));
    }
    if !(config.prior_smoothing >= 0.0) {
        return Err(Error::InvalidConfig("prior_smoothing must be >= 0".into()));
    }
    data.require_all_classes()?;

    let n_classes = data.n_classes();
    let dim = data.n_features();
    let counts = data.class_counts();

    let mut means = vec![vec![0.0; dim]; n_classes];
    for (x, &t) in data.inputs.iter().zip(&data.targets) {
        for (m, v) in means[t].iter_mut().zip(x) {
            *m += v;
        }
    }
    for (row, &n) in means.iter_mut().zip(&counts) {
        row.iter_mut().for_each(|m| *m /= n as f64);
    }

    let mut variances = vec![vec![0.0; dim]; n_classes];
    for (x, &t) in data.inputs.iter().zip(&data.targets) {
        for ((s, v), m) in variances[t].iter_mut().zip(x).zip(&means[t]) {
            *s += (v - m) * (v - m);
        }
    }
    for (row, &n) in variances.iter_mut().zip(&counts) {
        row.iter_mut()
            .for_each(|s| *s = (*s / n as f64).max(config.variance_floor));
    }

    let total = data.len() as f64 + config.prior_smoothing * n_classes as f64;
    let priors = counts
        .iter()
        .map(|&c| (c as f64 + config.prior_smoothing) / total)
        .collect();

    Ok(NbModel {
        classes: data.classes.clone(),
        priors,
        means,
        variances,
        feature_count: dim,
    })
}

fn log_normal_density(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (2.0 * PI * variance).ln() - d * d / (2.0 * variance)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl NbModel {
    /// Assemble a model from explicit parameters, checking its invariants.
    pub fn from_parts(
        classes: Vec<String>,
        priors: Vec<f64>,
        means: Vec<Vec<f64>>,
        variances: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = classes.len();
        if n < 2 || priors.len() != n || means.len() != n || variances.len() != n {
            return Err(Error::InvalidConfig("parameter tables must have one row per class".into()));
        }
        let dim = means[0].len();
        if means.iter().chain(&variances).any(|r| r.len() != dim) {
            return Err(Error::InvalidConfig("ragged parameter tables".into()));
        }
        if variances.iter().flatten().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidConfig("variances must be positive".into()));
        }
        if priors.iter().any(|&p| !(p > 0.0)) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig("priors must be positive and sum to 1".into()));
        }
        Ok(NbModel {
            classes,
            priors,
            means,
            variances,
            feature_count: dim,
        })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_count {
            return Err(Error::DimensionMismatch {
                expected: self.feature_count,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// `log_terms(x)[class][j]` is the log-density of feature `j` under `class`.
    pub fn log_terms(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(x)?;
        Ok(self
            .means
            .iter()
            .zip(&self.variances)
            .map(|(mu, var)| {
                x.iter()
                    .zip(mu.iter().zip(var))
                    .map(|(&v, (&m, &s))| log_normal_density(v, m, s))
                    .collect()
            })
            .collect())
    }

    /// Unnormalized log posterior per class: log prior plus the feature log-densities.
    pub fn log_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .log_terms(x)?
            .iter()
            .zip(&self.priors)
            .map(|(terms, p)| p.ln() + terms.iter().sum::<f64>())
            .collect())
    }

    pub fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        let scores = self.log_scores(x)?;
        let norm = log_sum_exp(&scores);
        Ok(scores.iter().map(|s| (s - norm).exp()).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.log_scores(x)?))
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<&str> {
        Ok(&self.classes[self.predict(x)?])
    }
}

impl Classifier for NbModel {
    fn n_features(&self) -> usize {
        self.feature_count
    }

    fn predict(&self, x: &[f64]) -> Result<usize> {
        NbModel::predict(self, x)
    }
}
