//! Feature-set specifications and the category-combination experiment grid.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{cross_validate, EvalReport, ResultsRow, ResultsTable};
use crate::features::{category_indices, validate_subset, FeatureCategory, NUM_FEATURES};
use crate::learner::AnyLearner;

/// Parse a feature set such as `cat2,cat3`, `8,9,10`, `9-21` or `all`.
///
/// Items keep their order; a feature named twice is an error.
pub fn parse_feature_spec(spec: &str) -> Result<Vec<usize>> {
    let mut ids = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let lower = item.to_ascii_lowercase();
        if lower == "all" {
            ids.extend(1..=NUM_FEATURES);
        } else if let Some(n) = lower.strip_prefix("cat") {
            let cat = n
                .parse()
                .ok()
                .and_then(FeatureCategory::from_number)
                .ok_or_else(|| Error::InvalidSubset(format!("unknown category `{item}`")))?;
            ids.extend(category_indices(cat));
        } else if let Some((a, b)) = lower.split_once('-') {
            let parse = |s: &str| {
                s.trim()
                    .trim_start_matches('f')
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSubset(format!("bad range `{item}`")))
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(Error::InvalidSubset(format!("empty range `{item}`")));
            }
            ids.extend(a..=b);
        } else {
            let i = lower
                .trim_start_matches('f')
                .parse::<usize>()
                .map_err(|_| Error::InvalidSubset(format!("bad feature `{item}`")))?;
            ids.push(i);
        }
    }
    validate_subset(&ids, NUM_FEATURES)?;
    Ok(ids)
}

/// The seven non-empty category combinations, labelled as in the results table.
pub fn category_combinations() -> Vec<(String, Vec<FeatureCategory>)> {
    use FeatureCategory::*;
    [
        vec![Subject],
        vec![Headers],
        vec![Body],
        vec![Subject, Headers],
        vec![Headers, Body],
        vec![Subject, Body],
        vec![Subject, Headers, Body],
    ]
    .into_iter()
    .map(|cats| {
        let label = if cats.len() == 1 {
            format!("Category {} Only", cats[0].number())
        } else {
            cats.iter()
                .map(|c| format!("Category {}", c.number()))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        (label, cats)
    })
    .collect()
}

pub fn combination_indices(cats: &[FeatureCategory]) -> Vec<usize> {
    let mut ids: Vec<usize> = cats.iter().flat_map(|&c| category_indices(c)).collect();
    ids.sort_unstable();
    ids
}

/// Cross-validate every learner on one feature set of `dataset`.
pub fn evaluate_feature_set(
    dataset: &Dataset,
    ids: &[usize],
    learners: &[AnyLearner],
    k: usize,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    let samples = dataset.project(ids)?.to_samples()?;
    learners
        .par_iter()
        .map(|l| cross_validate(l, &samples, k, seed))
        .collect()
}

/// Accuracy / precision / recall for each category combination and learner.
pub fn category_table(dataset: &Dataset, learners: &[AnyLearner], k: usize, seed: u64) -> Result<ResultsTable> {
    let combos = category_combinations();
    let rows = combos
        .par_iter()
        .map(|(label, cats)| {
            let reports = evaluate_feature_set(dataset, &combination_indices(cats), learners, k, seed)?;
            Ok(ResultsRow {
                features: label.clone(),
                results: reports.into_iter().map(Some).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultsTable {
        title: String::new(),
        classifiers: learners.iter().map(|l| l.kind().display_name().to_string()).collect(),
        rows,
    })
}
