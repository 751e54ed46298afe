//! LIME-style local surrogate explanations for text classifiers.
//!
//! Words are removed from the document at random (every occurrence of a
//! removed word goes), the classifier is queried on each masked copy, and a
//! kernel-weighted ridge regression of the originally predicted class's
//! probability on the masks yields one coefficient per unique word.

mod classifier;
mod surrogate;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use classifier::{softmax, Classifier, LexiconClassifier, BIAS_KEY};
pub use surrogate::{fit_surrogate, kernel_weight, sample_masks, SurrogateFit};

use crate::error::{Error, Result};
use crate::ranked::{Document, Feature, RankedExplanation};
use crate::scalar::Scalar;
use crate::similarity::{similarity, MeasureSpec, SimilarityValue};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurrogateConfig {
    pub n_samples: usize,
    pub kernel_width: f64,
    pub ridge_lambda: f64,
    pub seed: u64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            n_samples: 500,
            kernel_width: 25.0,
            ridge_lambda: 1.0,
            seed: 0,
        }
    }
}

impl SurrogateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::Config("n_samples must be at least 2".into()));
        }
        if !(self.kernel_width.is_finite() && self.kernel_width > 0.0) {
            return Err(Error::Config(
                "kernel_width must be finite and positive".into(),
            ));
        }
        if !(self.ridge_lambda.is_finite() && self.ridge_lambda > 0.0) {
            return Err(Error::Config(
                "ridge_lambda must be finite and positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Explains `model`'s prediction on `doc`. Deterministic in `(doc, model, cfg)`.
pub fn explain<T: Scalar, C: Classifier<T> + ?Sized>(
    doc: &Document,
    model: &C,
    cfg: &SurrogateConfig,
) -> RankedExplanation<T> {
    let vocab = doc.vocabulary();
    let slot: HashMap<&Feature, usize> = vocab.iter().enumerate().map(|(k, f)| (f, k)).collect();
    let token_slots: Vec<usize> = doc.tokens().iter().map(|t| slot[t]).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let masks = sample_masks(vocab.len(), cfg.n_samples, &mut rng);
    let label = model.predict(doc).argmax();

    let width = T::lit(cfg.kernel_width);
    let mut responses = Vec::with_capacity(masks.len());
    let mut weights = Vec::with_capacity(masks.len());
    let mut kept: Vec<Feature> = Vec::with_capacity(doc.len());
    for mask in &masks {
        kept.clear();
        kept.extend(
            doc.tokens()
                .iter()
                .zip(&token_slots)
                .filter(|(_, &s)| mask[s])
                .map(|(t, _)| t.clone()),
        );
        responses.push(model.predict_tokens(&kept).prob(label));
        weights.push(kernel_weight(mask, width));
    }
    let fit = fit_surrogate(&masks, &weights, &responses, T::lit(cfg.ridge_lambda));
    RankedExplanation::new(vocab.into_iter().zip(fit.coefficients).collect())
        .expect("unique words with finite coefficients")
}

/// Pairwise similarities between `k` explanations of the same document
/// using seeds `cfg.seed + 0 .. cfg.seed + k - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instability<T> {
    pub pairs: Vec<SimilarityValue<T>>,
    pub mean: T,
    pub min: T,
}

pub fn inherent_instability<T: Scalar, C: Classifier<T> + ?Sized>(
    doc: &Document,
    model: &C,
    cfg: &SurrogateConfig,
    repetitions: usize,
    spec: &MeasureSpec<T>,
) -> Result<Instability<T>> {
    if repetitions < 2 {
        return Err(Error::Config(
            "instability needs at least 2 repetitions".into(),
        ));
    }
    spec.validate()?;
    let explanations: Vec<RankedExplanation<T>> = (0..repetitions)
        .map(|r| explain(doc, model, &cfg.with_seed(cfg.seed.wrapping_add(r as u64))))
        .collect();
    let mut pairs = Vec::with_capacity(repetitions * (repetitions - 1) / 2);
    for i in 0..repetitions {
        for j in i + 1..repetitions {
            pairs.push(similarity(spec, &explanations[i], &explanations[j])?);
        }
    }
    let values = pairs.iter().map(|s| s.value());
    let mean = values.clone().sum::<T>() / T::from_usize_lossy(pairs.len());
    let min = values.fold(T::one(), T::min);
    Ok(Instability { pairs, mean, min })
}
