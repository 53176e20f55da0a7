mod support;

use std::collections::HashSet;

use proptest::prelude::*;
use spambehave::learner::{Classifier, Learner};
use spambehave::{confusion, cross_validate, metrics, stratified_folds, ConfusionMatrix, Error, Result, Samples};
use support::oracles::two_classes;

fn matrix(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::empty(two_classes());
    m.counts = vec![vec![tp, fp], vec![fn_, tn]];
    m
}

#[test]
fn metrics_arithmetic() {
    let r = metrics(&matrix(45, 5, 10, 40)).unwrap();
    assert_eq!(r.accuracy, 0.85);
    assert_eq!(r.per_class[0].precision, 0.9);
    assert_eq!(r.per_class[0].recall, 45.0 / 55.0);
    assert_eq!(r.per_class[1].precision, 40.0 / 50.0);
    assert_eq!(r.per_class[1].recall, 40.0 / 45.0);
    assert!(!r.undefined_metric);
}

#[test]
fn confusion_counts_by_prediction_then_truth() {
    let m = confusion(&two_classes(), &[0, 0, 1], &[0, 1, 1]).unwrap();
    assert_eq!((m.true_positives(0), m.false_positives(0)), (1, 1));
    assert_eq!((m.false_negatives(0), m.true_negatives(0)), (0, 1));
    assert_eq!(confusion(&two_classes(), &[0, 1, 1], &[0, 0, 1]).unwrap(), m.transpose());
    assert!(matches!(
        confusion(&two_classes(), &[0], &[0, 1]),
        Err(Error::LengthMismatch { predictions: 1, truth: 2 })
    ));
}

#[test]
fn zero_denominators_are_flagged() {
    let r = metrics(&matrix(0, 0, 5, 5)).unwrap();
    assert_eq!(r.per_class[0].precision, 0.0);
    assert!(r.undefined_metric);
    assert!(matches!(metrics(&matrix(0, 0, 0, 0)), Err(Error::EmptyMatrix)));
}

#[test]
fn folds_are_stratified_partitions() {
    let targets: Vec<usize> = (0..200).map(|i| i % 2).collect();
    let folds = stratified_folds(&targets, 2, 10, 1).unwrap();
    for f in &folds {
        assert_eq!(f.iter().filter(|&&i| targets[i] == 0).count(), 10);
        assert_eq!(f.len(), 20);
    }
    let all: HashSet<usize> = folds.iter().flatten().copied().collect();
    assert_eq!(all.len(), 200);
    assert_eq!(folds, stratified_folds(&targets, 2, 10, 1).unwrap());
    assert_ne!(folds, stratified_folds(&targets, 2, 10, 2).unwrap());
    assert!(matches!(stratified_folds(&targets[..15], 2, 10, 1), Err(Error::TooFewSamples(_))));
}

struct Always(usize);

impl Classifier for Always {
    fn n_features(&self) -> usize {
        0
    }
    fn predict(&self, _: &[f64]) -> Result<usize> {
        Ok(self.0)
    }
}

impl Learner for Always {
    type Model = Always;
    fn fit(&self, _: &Samples) -> Result<Always> {
        Ok(Always(self.0))
    }
}

/// Predicts the majority label among exact training duplicates of the input.
struct Memorize;

struct Memory(Samples);

impl Classifier for Memory {
    fn n_features(&self) -> usize {
        self.0.n_features()
    }
    fn predict(&self, x: &[f64]) -> Result<usize> {
        let mut votes = vec![0; self.0.n_classes()];
        for (row, &t) in self.0.inputs.iter().zip(&self.0.targets) {
            if row.as_slice() == x {
                votes[t] += 1;
            }
        }
        Ok(spambehave::learner::argmax(&votes.iter().map(|&v| v as f64).collect::<Vec<_>>()))
    }
}

impl Learner for Memorize {
    type Model = Memory;
    fn fit(&self, data: &Samples) -> Result<Memory> {
        Ok(Memory(data.clone()))
    }
}

#[test]
fn constant_learner_scores_half_on_balanced_data() {
    let data = Samples::new(two_classes(), (0..40).map(|i| vec![i as f64]).collect(), (0..40).map(|i| i % 2).collect())
        .unwrap();
    let r = cross_validate(&Always(0), &data, 10, 1).unwrap();
    assert_eq!(r.accuracy, 0.5);
    assert_eq!(r.matrix.total(), 40);
    assert_eq!(r.fold_reports.len(), 10);
}

#[test]
fn memorizer_is_perfect_on_duplicated_data() {
    // every spam row is [1, 1], every ham row [0, 0]; folds never leak
    let inputs = (0..30).map(|i| vec![(i % 2 == 0) as u8 as f64; 2]).collect();
    let targets = (0..30).map(|i| if i % 2 == 0 { 0 } else { 1 }).collect();
    let data = Samples::new(two_classes(), inputs, targets).unwrap();
    assert_eq!(cross_validate(&Memorize, &data, 5, 3).unwrap().accuracy, 1.0);
}

struct Failing;

impl Learner for Failing {
    type Model = Always;
    fn fit(&self, _: &Samples) -> Result<Always> {
        Err(Error::NonFiniteLoss { epoch: 7 })
    }
}

#[test]
fn learner_errors_carry_the_fold() {
    let data = Samples::new(two_classes(), (0..20).map(|i| vec![i as f64]).collect(), (0..20).map(|i| i % 2).collect())
        .unwrap();
    match cross_validate(&Failing, &data, 4, 1) {
        Err(Error::Fold { fold, source }) => {
            assert!(fold < 4);
            assert!(matches!(*source, Error::NonFiniteLoss { epoch: 7 }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #[test]
    fn accuracy_is_mean_agreement(pairs in prop::collection::vec((0usize..2, 0usize..2), 1..200)) {
        let (p, t): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
        let r = metrics(&confusion(&two_classes(), &p, &t).unwrap()).unwrap();
        let agree = pairs.iter().filter(|(a, b)| a == b).count() as f64 / pairs.len() as f64;
        prop_assert_eq!(r.accuracy, agree);
        for c in &r.per_class {
            prop_assert!((0.0..=1.0).contains(&c.precision) && (0.0..=1.0).contains(&c.recall));
        }
        let lo = r.per_class.iter().map(|c| c.precision).fold(1.0, f64::min);
        let hi = r.per_class.iter().map(|c| c.precision).fold(0.0, f64::max);
        prop_assert!(r.weighted_precision >= lo - 1e-12 && r.weighted_precision <= hi + 1e-12);
        prop_assert!((r.weighted_recall - r.accuracy).abs() < 1e-12);
    }

    #[test]
    fn permutation_does_not_change_metrics(pairs in prop::collection::vec((0usize..2, 0usize..2), 1..100), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut support::oracles::rng(seed));
        let report = |v: &[(usize, usize)]| {
            let (p, t): (Vec<usize>, Vec<usize>) = v.iter().copied().unzip();
            metrics(&confusion(&two_classes(), &p, &t).unwrap()).unwrap()
        };
        prop_assert_eq!(report(&pairs), report(&shuffled));
    }

    #[test]
    fn fold_class_counts_differ_by_at_most_one(n0 in 5usize..60, n1 in 5usize..60, k in 2usize..6, seed in any::<u64>()) {
        let targets: Vec<usize> = (0..n0).map(|_| 0).chain((0..n1).map(|_| 1)).collect();
        let folds = stratified_folds(&targets, 2, k, seed).unwrap();
        for class in 0..2 {
            let counts: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| targets[i] == class).count()).collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(folds.iter().map(Vec::len).sum::<usize>(), n0 + n1);
    }
}
