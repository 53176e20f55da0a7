//! Labelled feature datasets and their CSV form.
//!
//! Header: `f<i>,...,label,source_id`. Proportion features (9-11) are
//! written with at least six decimals; every value is written so that it
//! parses back to the identical `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::features::{feature_name, parse_feature_name, validate_subset, FeatureVector, Label, NUM_FEATURES};
use crate::learner::Samples;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Global feature indices (1..=21) of the columns, in column order.
    pub feature_ids: Vec<usize>,
    pub rows: Vec<FeatureVector>,
}

impl Dataset {
    pub fn new(feature_ids: Vec<usize>, rows: Vec<FeatureVector>) -> Result<Self> {
        validate_subset(&feature_ids, NUM_FEATURES)?;
        if let Some(bad) = rows.iter().find(|r| r.values.len() != feature_ids.len()) {
            return Err(Error::DimensionMismatch {
                expected: feature_ids.len(),
                actual: bad.values.len(),
            });
        }
        Ok(Dataset { feature_ids, rows })
    }

    pub fn full(rows: Vec<FeatureVector>) -> Result<Self> {
        Dataset::new((1..=NUM_FEATURES).collect(), rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.feature_ids.iter().map(|&i| feature_name(i)).collect()
    }

    /// Column positions of the global indices in `ids`.
    pub fn columns_of(&self, ids: &[usize]) -> Result<Vec<usize>> {
        validate_subset(ids, NUM_FEATURES)?;
        ids.iter()
            .map(|id| {
                self.feature_ids
                    .iter()
                    .position(|f| f == id)
                    .ok_or_else(|| Error::FeatureMismatch {
                        model: describe_ids(ids),
                        input: describe_ids(&self.feature_ids),
                    })
            })
            .collect()
    }

    /// Keep only the global feature indices in `ids`, in that order.
    pub fn project(&self, ids: &[usize]) -> Result<Dataset> {
        let cols = self.columns_of(ids)?;
        Ok(Dataset {
            feature_ids: ids.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| FeatureVector {
                    values: cols.iter().map(|&c| r.values[c]).collect(),
                    label: r.label,
                    source_id: r.source_id.clone(),
                })
                .collect(),
        })
    }

    /// Numeric samples with classes `[spam, ham]`; every row must be labelled.
    pub fn to_samples(&self) -> Result<Samples> {
        let mut targets = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            match r.label {
                Some(l) => targets.push(l.class_index()),
                None => {
                    return Err(Error::LabelsRequired(format!(
                        "row `{}` has no label",
                        r.source_id
                    )))
                }
            }
        }
        Samples::new(
            Label::ALL.iter().map(|l| l.to_string()).collect(),
            self.rows.iter().map(|r| r.values.clone()).collect(),
            targets,
        )
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.feature_names();
        header.push("label".into());
        header.push("source_id".into());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r
                .values
                .iter()
                .zip(&self.feature_ids)
                .map(|(&v, &id)| format_value(id, v))
                .collect();
            rec.push(r.label.map(|l| l.to_string()).unwrap_or_default());
            rec.push(r.source_id.clone());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = r.headers()?.clone();
        let n = header.len();
        if n < 3 || &header[n - 2] != "label" || &header[n - 1] != "source_id" {
            return Err(Error::InvalidDataset(
                "header must end with `label,source_id`".into(),
            ));
        }
        let feature_ids = header
            .iter()
            .take(n - 2)
            .map(|h| {
                parse_feature_name(h)
                    .ok_or_else(|| Error::InvalidDataset(format!("bad feature column `{h}`")))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let values = rec
                .iter()
                .take(n - 2)
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidDataset(format!("row {}: `{v}` is not a number", line + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let label = match rec[n - 2].trim() {
                "" => None,
                s => Some(s.parse::<Label>()?),
            };
            rows.push(FeatureVector {
                values,
                label,
                source_id: rec[n - 1].to_string(),
            });
        }
        Dataset::new(feature_ids, rows)
    }
}

pub fn describe_ids(ids: &[usize]) -> String {
    ids.iter().map(|&i| feature_name(i)).collect::<Vec<_>>().join(",")
}

fn format_value(feature_id: usize, v: f64) -> String {
    let shortest = v.to_string();
    if !(9..=11).contains(&feature_id) {
        return shortest;
    }
    let decimals = shortest.split_once('.').map_or(0, |(_, d)| d.len());
    if decimals >= 6 {
        shortest
    } else {
        format!("{v:.6}")
    }
}
