//! Ranked-list similarity measures for feature-attribution explanations,
//! a LIME-style surrogate explainer for text classifiers, and a greedy
//! word-substitution attack that drives explanation similarity below a
//! threshold.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which the attack and experiment code use.

pub mod attack;
pub mod config;
pub mod error;
pub mod explainer;
pub mod harness;
pub mod linalg;
pub mod ranked;
pub mod scalar;
pub mod similarity;

pub use error::{Error, Result};
pub use ranked::{
    normalize_weights, parse_corpus, parse_explanation, serialize_explanation, Document, Feature,
    LabeledDocument,
};
pub use scalar::Scalar;
pub use similarity::{similarity, MeasureKind, Normalization};

pub type Explanation = ranked::RankedExplanation<f64>;
pub type Explanation32 = ranked::RankedExplanation<f32>;
pub type Weights = ranked::WeightVector<f64>;
pub type Distribution = ranked::LabelDistribution<f64>;
pub type Similarity = similarity::SimilarityValue<f64>;
pub type Measure = similarity::MeasureSpec<f64>;
pub type Measure32 = similarity::MeasureSpec<f32>;
pub type Lexicon = explainer::LexiconClassifier<f64>;
