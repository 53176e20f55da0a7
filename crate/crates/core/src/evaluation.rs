//! Confusion matrices, accuracy / precision / recall, and stratified
//! cross-validation.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{Classifier, Learner, Samples};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    /// `counts[predicted][truth]`
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn empty(classes: Vec<String>) -> Self {
        let n = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn true_positives(&self, class: usize) -> u64 {
        self.counts[class][class]
    }

    pub fn false_positives(&self, class: usize) -> u64 {
        self.counts[class].iter().sum::<u64>() - self.counts[class][class]
    }

    pub fn false_negatives(&self, class: usize) -> u64 {
        self.support(class) - self.counts[class][class]
    }

    pub fn true_negatives(&self, class: usize) -> u64 {
        self.total() - self.true_positives(class) - self.false_positives(class) - self.false_negatives(class)
    }

    /// Number of samples whose true class is `class`.
    pub fn support(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.classes.len();
        ConfusionMatrix {
            classes: self.classes.clone(),
            counts: (0..n).map(|p| (0..n).map(|t| self.counts[t][p]).collect()).collect(),
        }
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, o) in self.counts.iter_mut().zip(&other.counts) {
            for (c, v) in row.iter_mut().zip(o) {
                *c += v;
            }
        }
    }

    pub fn record(&mut self, predicted: usize, truth: usize) {
        self.counts[predicted][truth] += 1;
    }
}

/// Predictions and truths are class indices into `classes`.
pub fn confusion(classes: &[String], predictions: &[usize], truth: &[usize]) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let n = classes.len();
    if let Some(&bad) = predictions.iter().chain(truth).find(|&&c| c >= n) {
        return Err(Error::InvalidDataset(format!("class index {bad} out of range")));
    }
    let mut m = ConfusionMatrix::empty(classes.to_vec());
    for (&p, &t) in predictions.iter().zip(truth) {
        m.record(p, t);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub matrix: ConfusionMatrix,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    /// Set when some precision or recall had a zero denominator and was reported as 0.
    pub undefined_metric: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fold_reports: Vec<EvalReport>,
}

fn ratio(num: u64, den: u64, undefined: &mut bool) -> f64 {
    if den == 0 {
        *undefined = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(m: &ConfusionMatrix) -> Result<EvalReport> {
    let total = m.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut undefined = false;
    let per_class: Vec<ClassMetrics> = (0..m.classes.len())
        .map(|i| {
            let tp = m.true_positives(i);
            ClassMetrics {
                class: m.classes[i].clone(),
                precision: ratio(tp, tp + m.false_positives(i), &mut undefined),
                recall: ratio(tp, tp + m.false_negatives(i), &mut undefined),
                support: m.support(i),
            }
        })
        .collect();
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        per_class
            .iter()
            .map(|c| c.support as f64 / total as f64 * f(c))
            .sum::<f64>()
    };
    Ok(EvalReport {
        matrix: m.clone(),
        accuracy: m.correct() as f64 / total as f64,
        weighted_precision: weighted(|c| c.precision),
        weighted_recall: weighted(|c| c.recall),
        per_class,
        undefined_metric: undefined,
        fold_reports: Vec::new(),
    })
}

/// Split sample indices into `k` stratified folds.
///
/// Each class is shuffled with the seed and dealt round-robin, continuing
/// from where the previous class stopped, so per-class counts across folds
/// differ by at most one and fold sizes stay balanced.
pub fn stratified_folds(targets: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::TooFewSamples(format!("k must be at least 2, got {k}")));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &t) in targets.iter().enumerate() {
        by_class[t].push(i);
    }
    if let Some((c, members)) = by_class.iter().enumerate().find(|(_, m)| m.len() < k) {
        return Err(Error::TooFewSamples(format!(
            "class {c} has {} samples, fewer than k = {k}",
            members.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Train on k-1 folds, predict the held-out fold, pool every prediction.
///
/// Folds run in parallel; results are merged by fold index.
pub fn cross_validate<L: Learner>(learner: &L, data: &Samples, k: usize, seed: u64) -> Result<EvalReport> {
    for (class, n) in data.classes.iter().zip(data.class_counts()) {
        if n < k {
            return Err(Error::TooFewSamples(format!("class `{class}` has {n} samples, fewer than k = {k}")));
        }
    }
    let folds = stratified_folds(&data.targets, data.n_classes(), k, seed)?;

    let per_fold: Vec<Result<ConfusionMatrix>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let mut in_test = vec![false; data.len()];
            test_idx.iter().for_each(|&i| in_test[i] = true);
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| !in_test[i]).collect();
            assert_eq!(train_idx.len() + test_idx.len(), data.len());
            assert!(train_idx.iter().all(|&i| !in_test[i]), "train/test overlap in fold {f}");

            let wrap = |e: Error| Error::Fold {
                fold: f,
                source: Box::new(e),
            };
            let model = learner.fit(&data.select(&train_idx)).map_err(wrap)?;
            let mut m = ConfusionMatrix::empty(data.classes.clone());
            for &i in test_idx {
                let p = model.predict(&data.inputs[i]).map_err(wrap)?;
                m.record(p, data.targets[i]);
            }
            Ok(m)
        })
        .collect();

    let mut pooled = ConfusionMatrix::empty(data.classes.clone());
    let mut fold_reports = Vec::with_capacity(k);
    for m in per_fold {
        let m = m?;
        pooled.merge(&m);
        fold_reports.push(metrics(&m)?);
    }
    let mut report = metrics(&pooled)?;
    report.fold_reports = fold_reports;
    Ok(report)
}

/// One labelled row of a results table: a feature set and one report per classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub features: String,
    pub results: Vec<Option<EvalReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub title: String,
    pub classifiers: Vec<String>,
    pub rows: Vec<ResultsRow>,
}

fn pct(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}

impl ResultsTable {
    /// Fixed-width table: one Accuracy / Precision / Recall group per classifier.
    pub fn render(&self) -> String {
        const GROUP: usize = 32;
        let label_w = self
            .rows
            .iter()
            .map(|r| r.features.chars().count())
            .chain(std::iter::once("Features".len()))
            .max()
            .unwrap_or(8);

        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "{}", self.title);
        }
        let _ = write!(out, "{:<label_w$}", "");
        for c in &self.classifiers {
            let _ = write!(out, " | {c:<GROUP$}");
        }
        out.push('\n');
        let _ = write!(out, "{:<label_w$}", "Features");
        for _ in &self.classifiers {
            let _ = write!(out, " | {:>10}{:>11}{:>11}", "Accuracy", "Precision", "Recall");
        }
        out.push('\n');
        let width = label_w + self.classifiers.len() * (GROUP + 3);
        let _ = writeln!(out, "{}", "-".repeat(width));
        for row in &self.rows {
            let _ = write!(out, "{:<label_w$}", row.features);
            for r in &row.results {
                match r {
                    Some(r) => {
                        let _ = write!(
                            out,
                            " | {:>10}{:>11}{:>11}",
                            pct(r.accuracy),
                            pct(r.weighted_precision),
                            pct(r.weighted_recall)
                        );
                    }
                    None => {
                        let _ = write!(out, " | {:>10}{:>11}{:>11}", "-", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
