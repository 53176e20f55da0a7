//! Versioned model persistence.
//!
//! A model file is a pretty-printed JSON document followed by a trailing
//! line `checksum sha256:<hex>` covering every byte before it. Floats are
//! written in shortest round-trip form, so a reloaded model predicts
//! bit-identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::describe_ids;
use crate::error::{Error, Result};
use crate::features::{feature_name, validate_subset, NUM_FEATURES};
use crate::learner::AnyModel;

pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM_PREFIX: &str = "checksum sha256:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    /// Global feature indices the model was trained on, in input order.
    pub feature_ids: Vec<usize>,
    pub feature_names: Vec<String>,
    #[serde(flatten)]
    pub model: AnyModel,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ModelFile {
    pub fn new(feature_ids: Vec<usize>, model: AnyModel) -> Result<Self> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            feature_names: feature_ids.iter().map(|&i| feature_name(i)).collect(),
            feature_ids,
            model,
        };
        file.validate().map_err(|e| match e {
            Error::CorruptModel(m) => Error::InvalidConfig(m),
            other => other,
        })?;
        Ok(file)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        let sum = digest_hex(text.as_bytes());
        text.push_str(CHECKSUM_PREFIX);
        text.push_str(&sum);
        text.push('\n');
        text.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| corrupt("not valid UTF-8"))?;
        let body_and_sum = text
            .strip_suffix('\n')
            .ok_or_else(|| corrupt("missing trailing newline"))?;
        let split = body_and_sum
            .rfind('\n')
            .ok_or_else(|| corrupt("missing checksum line"))?;
        let (body, sum_line) = (&text[..split + 1], &body_and_sum[split + 1..]);
        let expected = sum_line
            .strip_prefix(CHECKSUM_PREFIX)
            .ok_or_else(|| corrupt("missing checksum line"))?;
        if expected != digest_hex(body.as_bytes()) {
            return Err(corrupt("checksum mismatch"));
        }

        let value: serde_json::Value =
            serde_json::from_str(body).map_err(|e| corrupt(format!("invalid document: {e}")))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| corrupt("missing format_version"))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::UnsupportedVersion {
                found: u32::try_from(version).unwrap_or(u32::MAX),
                supported: FORMAT_VERSION,
            });
        }
        let file: ModelFile =
            serde_json::from_str(body).map_err(|e| corrupt(format!("invalid document: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn describe_features(&self) -> String {
        describe_ids(&self.feature_ids)
    }

    fn validate(&self) -> Result<()> {
        validate_subset(&self.feature_ids, NUM_FEATURES).map_err(|e| corrupt(e.to_string()))?;
        let names: Vec<String> = self.feature_ids.iter().map(|&i| feature_name(i)).collect();
        if names != self.feature_names {
            return Err(corrupt("feature_names disagree with feature_ids"));
        }
        let dim = self.feature_ids.len();
        match &self.model {
            AnyModel::NaiveBayes(m) => {
                let n = m.classes.len();
                if n < 2 || m.priors.len() != n || m.means.len() != n || m.variances.len() != n {
                    return Err(corrupt("naive Bayes tables do not match class count"));
                }
                if m.feature_count != dim || m.means.iter().chain(&m.variances).any(|r| r.len() != dim) {
                    return Err(corrupt("naive Bayes tables do not match feature count"));
                }
                if m.variances.iter().flatten().any(|&v| !(v > 0.0)) {
                    return Err(corrupt("non-positive variance"));
                }
                if (m.priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(corrupt("priors do not sum to 1"));
                }
            }
            AnyModel::Mlp(m) => {
                let hidden = m.w_hidden.len();
                if m.classes.len() < 2 || m.scaling.len() != dim || hidden == 0 {
                    return Err(corrupt("MLP shape does not match features"));
                }
                if m.w_hidden.iter().any(|r| r.len() != dim + 1)
                    || m.w_out.len() != m.classes.len()
                    || m.w_out.iter().any(|r| r.len() != hidden + 1)
                {
                    return Err(corrupt("MLP weight matrices have the wrong shape"));
                }
                if m.w_hidden.iter().chain(&m.w_out).flatten().any(|w| !w.is_finite()) {
                    return Err(corrupt("non-finite weight"));
                }
                if m.scaling.iter().any(|&(lo, hi)| !(lo <= hi)) {
                    return Err(corrupt("scaling minimum exceeds maximum"));
                }
            }
        }
        Ok(())
    }
}
