//! Spam classification from spammer behavior rather than vocabulary.
//!
//! The pipeline: [`email_parser`] turns raw messages into headers and body,
//! [`features`] computes 21 behavioral features, [`naive_bayes`] and [`mlp`]
//! learn from them, [`evaluation`] cross-validates, and [`selection`] runs a
//! best-first forward search for a smaller feature set.

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod dataset;
pub mod email_parser;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod features;
pub mod learner;
pub mod mlp;
pub mod model_file;
pub mod naive_bayes;
pub mod selection;
pub mod synth;

pub use corpus::{build_dataset, ingest, Corpus, CorpusEntry, Layout};
pub use dataset::Dataset;
pub use email_parser::{is_alphabetic_word, parse_email, tokenize, ParsedEmail, RawEmail, Token};
pub use error::{Error, Result};
pub use evaluation::{confusion, cross_validate, metrics, stratified_folds, ConfusionMatrix, EvalReport};
pub use features::{category_indices, extract, project, FeatureCategory, FeatureVector, Label, NUM_FEATURES};
pub use learner::{AnyLearner, AnyModel, Classifier, ClassifierKind, Learner, Samples};
pub use mlp::{MlpConfig, MlpModel};
pub use model_file::{ModelFile, FORMAT_VERSION};
pub use naive_bayes::{NbConfig, NbModel};
pub use selection::{best_first_forward, evaluate_subset, FeatureSubset, SearchConfig};
pub use synth::{synth_corpus, SynthConfig};
