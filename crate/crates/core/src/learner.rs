//! Shared plumbing between the classifiers and the evaluation harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{MlpConfig, MlpModel};
use crate::naive_bayes::{NbConfig, NbModel};

/// Numeric inputs with class indices into `classes`.
///
/// Class order is declaration order; it decides argmax ties.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub classes: Vec<String>,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<usize>,
}

impl Samples {
    pub fn new(classes: Vec<String>, inputs: Vec<Vec<f64>>, targets: Vec<usize>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::InvalidDataset(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= classes.len()) {
            return Err(Error::InvalidDataset(format!(
                "target {t} out of range for {} classes",
                classes.len()
            )));
        }
        if let Some(first) = inputs.first() {
            let dim = first.len();
            if let Some(bad) = inputs.iter().find(|x| x.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: bad.len(),
                });
            }
        }
        Ok(Samples {
            classes,
            inputs,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &t in &self.targets {
            counts[t] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Samples {
        Samples {
            classes: self.classes.clone(),
            inputs: indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
        }
    }

    /// Keep only the given 0-based columns, in that order.
    pub fn select_columns(&self, columns: &[usize]) -> Samples {
        Samples {
            classes: self.classes.clone(),
            inputs: self
                .inputs
                .iter()
                .map(|x| columns.iter().map(|&c| x[c]).collect())
                .collect(),
            targets: self.targets.clone(),
        }
    }

    /// Errors unless there are at least two classes and each one has a sample.
    pub fn require_all_classes(&self) -> Result<()> {
        if self.classes.len() < 2 {
            return Err(Error::InvalidDataset("at least two classes required".into()));
        }
        let counts = self.class_counts();
        if let Some(i) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass(self.classes[i].clone()));
        }
        Ok(())
    }
}

pub trait Classifier {
    fn n_features(&self) -> usize;

    /// Predicted class index.
    fn predict(&self, x: &[f64]) -> Result<usize>;
}

pub trait Learner: Sync {
    type Model: Classifier + Send;

    fn fit(&self, data: &Samples) -> Result<Self::Model>;
}

/// Index of the largest score; the earliest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    Mlp,
}

impl ClassifierKind {
    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "Naive Bayes",
            ClassifierKind::Mlp => "MLP",
        }
    }
}

/// Either classifier, configured.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyLearner {
    NaiveBayes(NbConfig),
    Mlp(MlpConfig),
}

impl AnyLearner {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            AnyLearner::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            AnyLearner::Mlp(_) => ClassifierKind::Mlp,
        }
    }

    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::NaiveBayes => AnyLearner::NaiveBayes(NbConfig::default()),
            ClassifierKind::Mlp => AnyLearner::Mlp(MlpConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "snake_case")]
pub enum AnyModel {
    NaiveBayes(NbModel),
    Mlp(MlpModel),
}

impl AnyModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            AnyModel::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            AnyModel::Mlp(_) => ClassifierKind::Mlp,
        }
    }

    pub fn classes(&self) -> &[String] {
        match self {
            AnyModel::NaiveBayes(m) => &m.classes,
            AnyModel::Mlp(m) => &m.classes,
        }
    }

    /// Per-class scores summing to one. For the MLP these are the output
    /// activations normalized by their sum.
    pub fn class_probabilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            AnyModel::NaiveBayes(m) => m.posterior(x),
            AnyModel::Mlp(m) => {
                let out = m.activations(x)?;
                let total: f64 = out.iter().sum();
                if total > 0.0 {
                    Ok(out.iter().map(|a| a / total).collect())
                } else {
                    // every output saturated at zero
                    Ok(vec![1.0 / out.len() as f64; out.len()])
                }
            }
        }
    }
}

impl Classifier for AnyModel {
    fn n_features(&self) -> usize {
        match self {
            AnyModel::NaiveBayes(m) => m.feature_count,
            AnyModel::Mlp(m) => m.n_features(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<usize> {
        match self {
            AnyModel::NaiveBayes(m) => m.predict(x),
            AnyModel::Mlp(m) => m.predict(x),
        }
    }
}

impl Learner for AnyLearner {
    type Model = AnyModel;

    fn fit(&self, data: &Samples) -> Result<AnyModel> {
        match self {
            AnyLearner::NaiveBayes(cfg) => crate::naive_bayes::fit(data, cfg).map(AnyModel::NaiveBayes),
            AnyLearner::Mlp(cfg) => crate::mlp::train(data, cfg).map(AnyModel::Mlp),
        }
    }
}
