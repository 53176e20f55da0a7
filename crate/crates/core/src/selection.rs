//! Best-first forward subset search with a cross-validation wrapper merit.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{cross_validate, EvalReport, ResultsRow, ResultsTable};
use crate::features::validate_subset;
use crate::learner::{Learner, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Consecutive expansions without a strictly better merit before stopping.
    pub stale_limit: usize,
    pub k_folds: usize,
    pub seed: u64,
    /// `None` for no budget.
    pub max_evaluations: Option<usize>,
}

impl SearchConfig {
    /// Stale limit 5, budget `10 * n_features^2`, 10 folds, seed 1.
    pub fn for_features(n_features: usize) -> Self {
        SearchConfig {
            stale_limit: 5,
            k_folds: 10,
            seed: 1,
            max_evaluations: Some(10 * n_features * n_features),
        }
    }

    /// Runs until the open list is empty: every subset gets evaluated.
    pub fn exhaustive(k_folds: usize, seed: u64) -> Self {
        SearchConfig {
            stale_limit: usize::MAX,
            k_folds,
            seed,
            max_evaluations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedSubset {
    pub indices: Vec<usize>,
    pub merit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSubset {
    /// Sorted, 1-based. Empty only when no subset beat the majority-class rate.
    pub indices: Vec<usize>,
    pub merit: f64,
    pub evaluations_used: usize,
    pub budget_exhausted: bool,
    /// Every subset evaluated, in evaluation order (the empty root first).
    #[serde(skip)]
    pub history: Vec<EvaluatedSubset>,
}

impl FeatureSubset {
    /// Translate column positions (1-based) into the ids in `ids`.
    pub fn map_indices(&self, ids: &[usize]) -> FeatureSubset {
        let mut indices: Vec<usize> = self.indices.iter().map(|&i| ids[i - 1]).collect();
        indices.sort_unstable();
        FeatureSubset {
            indices,
            ..self.clone()
        }
    }
}

/// Majority-class rate: the merit of predicting with no features at all.
pub fn empty_set_merit(data: &Samples) -> f64 {
    let counts = data.class_counts();
    let max = counts.iter().copied().max().unwrap_or(0);
    if data.is_empty() {
        0.0
    } else {
        max as f64 / data.len() as f64
    }
}

/// Cross-validated accuracy of `learner` on the columns in `subset` (1-based).
pub fn evaluate_subset<L: Learner>(
    data: &Samples,
    subset: &[usize],
    learner: &L,
    k_folds: usize,
    seed: u64,
) -> Result<f64> {
    validate_subset(subset, data.n_features())?;
    let columns: Vec<usize> = subset.iter().map(|i| i - 1).collect();
    let projected = data.select_columns(&columns);
    Ok(cross_validate(learner, &projected, k_folds, seed)?.accuracy)
}

/// Higher merit first, then fewer features, then lexicographically smaller.
fn preferred(a: &EvaluatedSubset, b: &EvaluatedSubset) -> bool {
    if a.merit != b.merit {
        return a.merit > b.merit;
    }
    if a.indices.len() != b.indices.len() {
        return a.indices.len() < b.indices.len();
    }
    a.indices < b.indices
}

fn pop_best(open: &mut Vec<EvaluatedSubset>) -> Option<EvaluatedSubset> {
    if open.is_empty() {
        return None;
    }
    let mut best = 0;
    for i in 1..open.len() {
        if preferred(&open[i], &open[best]) {
            best = i;
        }
    }
    Some(open.swap_remove(best))
}

pub fn best_first_forward<L: Learner>(
    data: &Samples,
    learner: &L,
    config: &SearchConfig,
) -> Result<FeatureSubset> {
    if config.stale_limit == 0 {
        return Err(Error::InvalidConfig("stale_limit must be at least 1".into()));
    }
    data.require_all_classes()?;
    let n = data.n_features();

    let root = EvaluatedSubset {
        indices: Vec::new(),
        merit: empty_set_merit(data),
    };
    let mut history = vec![root.clone()];
    let mut visited: HashSet<Vec<usize>> = HashSet::from([Vec::new()]);
    let mut open = vec![root.clone()];
    let mut best = root;
    let mut stale = 0;
    let mut budget_exhausted = false;

    while let Some(node) = pop_best(&mut open) {
        let mut children: Vec<Vec<usize>> = (1..=n)
            .filter(|f| !node.indices.contains(f))
            .map(|f| {
                let mut c = node.indices.clone();
                let pos = c.partition_point(|&x| x < f);
                c.insert(pos, f);
                c
            })
            .filter(|c| !visited.contains(c))
            .collect();

        if let Some(max) = config.max_evaluations {
            let remaining = max.saturating_sub(history.len());
            if children.len() > remaining {
                children.truncate(remaining);
                budget_exhausted = true;
            }
        }

        let merits: Vec<Result<f64>> = children
            .par_iter()
            .map(|c| evaluate_subset(data, c, learner, config.k_folds, config.seed))
            .collect();

        let mut improved = false;
        for (indices, merit) in children.into_iter().zip(merits) {
            let child = EvaluatedSubset {
                indices,
                merit: merit?,
            };
            visited.insert(child.indices.clone());
            history.push(child.clone());
            if preferred(&child, &best) {
                improved |= child.merit > best.merit;
                best = child.clone();
            }
            open.push(child);
        }

        if budget_exhausted {
            break;
        }
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.stale_limit {
                break;
            }
        }
    }

    Ok(FeatureSubset {
        indices: best.indices,
        merit: best.merit,
        evaluations_used: history.len(),
        budget_exhausted,
        history,
    })
}

/// `8`, `8 and 9`, `8, 9, and 10`.
pub fn format_index_list(indices: &[usize]) -> String {
    let parts: Vec<String> = indices.iter().map(usize::to_string).collect();
    match parts.len() {
        0 => "(none)".to_string(),
        1 => parts[0].clone(),
        2 => format!("{} and {}", parts[0], parts[1]),
        n => format!("{}, and {}", parts[..n - 1].join(", "), parts[n - 1]),
    }
}

/// Comma-separated indices, as accepted by feature-set arguments.
pub fn format_index_spec(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub indices: Vec<usize>,
    pub merit: f64,
    pub evaluations_used: usize,
    pub budget_exhausted: bool,
    pub comparison: ResultsTable,
}

/// Side-by-side metrics for the selected subset and, when given, a baseline
/// feature set. Reports are listed in the order of `classifiers`.
pub fn report_selection(
    result: &FeatureSubset,
    classifiers: &[String],
    subset_reports: Vec<Option<EvalReport>>,
    baseline: Option<(String, Vec<Option<EvalReport>>)>,
) -> SelectionReport {
    let mut rows = Vec::new();
    if let Some((label, reports)) = baseline {
        rows.push(ResultsRow {
            features: label,
            results: reports,
        });
    }
    rows.push(ResultsRow {
        features: format!("Best first: {}", format_index_list(&result.indices)),
        results: subset_reports,
    });
    SelectionReport {
        indices: result.indices.clone(),
        merit: result.merit,
        evaluations_used: result.evaluations_used,
        budget_exhausted: result.budget_exhausted,
        comparison: ResultsTable {
            title: String::new(),
            classifiers: classifiers.to_vec(),
            rows,
        },
    }
}

impl SelectionReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.indices.is_empty() {
            let _ = writeln!(out, "selected features: none (no subset beats the majority-class rate)");
        } else {
            let _ = writeln!(out, "selected features: {}", format_index_spec(&self.indices));
        }
        let _ = writeln!(out, "merit: {:.4}", self.merit);
        let _ = writeln!(out, "evaluations: {}", self.evaluations_used);
        if self.budget_exhausted {
            let _ = writeln!(out, "note: evaluation budget exhausted; result is the best found so far");
        }
        out.push('\n');
        out.push_str(&self.comparison.render());
        out
    }
}
