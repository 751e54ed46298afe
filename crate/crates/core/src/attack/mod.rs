//! Greedy word-substitution attack on explanations.
//!
//! Token positions are visited from least to most important. At each
//! position every admissible replacement is tried, the perturbed document
//! is re-explained, and the replacement giving the lowest similarity to the
//! original explanation is kept if it lowers the current similarity. The
//! search stops once similarity reaches the threshold, the perturbation
//! budget is spent, or positions run out.

mod synonyms;

use std::collections::HashSet;

pub use synonyms::{EmbeddingIndex, NoSynonyms, SynonymProvider, SynonymTable};

use crate::error::{Error, Result};
use crate::explainer::{explain, Classifier, SurrogateConfig};
use crate::ranked::{Document, Feature};
use crate::similarity::{similarity, MeasureSpec};
use crate::{Explanation, Measure};

#[derive(Clone, Debug, PartialEq)]
pub struct AttackConfig {
    pub measure: Measure,
    /// Success threshold: the attack succeeds once similarity `<= tau`.
    pub tau: f64,
    pub max_perturb_frac: f64,
    pub n_neighbors: usize,
    pub min_embedding_sim: f64,
    pub stopwords: HashSet<Feature>,
    pub seed: u64,
    /// Start from the similarity of a fresh re-explanation instead of 1.0.
    pub reexplain_initial: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            measure: MeasureSpec::rbo(0.5),
            tau: 0.5,
            max_perturb_frac: 0.2,
            n_neighbors: 20,
            min_embedding_sim: 0.5,
            stopwords: HashSet::new(),
            seed: 0,
            reexplain_initial: false,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        self.measure.validate()?;
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Config(format!("tau {} outside (0,1)", self.tau)));
        }
        if !(self.max_perturb_frac > 0.0 && self.max_perturb_frac <= 1.0) {
            return Err(Error::Config(format!(
                "max_perturb_frac {} outside (0,1]",
                self.max_perturb_frac
            )));
        }
        if self.n_neighbors == 0 {
            return Err(Error::Config("n_neighbors must be positive".into()));
        }
        if !(-1.0..=1.0).contains(&self.min_embedding_sim) {
            return Err(Error::Config("min_embedding_sim outside [-1,1]".into()));
        }
        Ok(())
    }

    /// `ceil(max_perturb_frac · n_tokens)`.
    pub fn budget(&self, n_tokens: usize) -> usize {
        // the epsilon absorbs products like 0.1·30 = 3.0000000000000004
        ((self.max_perturb_frac * n_tokens as f64) - 1e-9)
            .ceil()
            .max(0.0) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub index: usize,
    pub original: Feature,
    pub replacement: Feature,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    pub success: bool,
    pub initial_similarity: f64,
    pub final_similarity: f64,
    pub perturbed_doc: Document,
    pub perturbations: Vec<Perturbation>,
    /// Explain calls made, including the original explanation.
    pub n_queries: usize,
    /// Similarity after each accepted perturbation.
    pub trace: Vec<f64>,
}

impl AttackResult {
    pub fn perturb_rate(&self) -> f64 {
        self.perturbations.len() as f64 / self.perturbed_doc.len() as f64
    }
}

/// Non-stopword token indices by ascending drop in the predicted class's
/// probability when that single token is deleted; ties by index.
pub fn importance_order<C: Classifier<f64> + ?Sized>(
    doc: &Document,
    model: &C,
    stopwords: &HashSet<Feature>,
) -> Vec<usize> {
    let full = model.predict(doc);
    let label = full.argmax();
    let base = full.prob(label);
    let mut scored: Vec<(usize, f64)> = doc
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| !stopwords.contains(*t))
        .map(|(i, _)| {
            let rest: Vec<Feature> = doc
                .tokens()
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, t)| t.clone())
                .collect();
            (i, base - model.predict_tokens(&rest).prob(label))
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored.into_iter().map(|(i, _)| i).collect()
}

/// Replacements for the token at `index` of `doc` that pass the embedding
/// threshold, are not stopwords, differ from the current word, and keep the
/// model's predicted class at `label`.
pub fn filter_candidates<C: Classifier<f64> + ?Sized, P: SynonymProvider + ?Sized>(
    doc: &Document,
    index: usize,
    provider: &P,
    cfg: &AttackConfig,
    model: &C,
    label: u32,
) -> Vec<Feature> {
    let word = &doc.tokens()[index];
    provider
        .candidates(word, cfg.n_neighbors)
        .into_iter()
        .filter(|(c, score)| {
            *score >= cfg.min_embedding_sim && c != word && !cfg.stopwords.contains(c)
        })
        .map(|(c, _)| c)
        .filter(|c| model.predict(&doc.with_replacement(index, c)).argmax() == label)
        .collect()
}

/// Runs the greedy search against `doc`.
pub fn greedy_attack<C: Classifier<f64> + ?Sized, P: SynonymProvider + ?Sized>(
    doc: &Document,
    model: &C,
    surrogate: &SurrogateConfig,
    cfg: &AttackConfig,
    provider: &P,
) -> Result<AttackResult> {
    cfg.validate()?;
    surrogate.validate()?;
    let original: Explanation = explain(doc, model, surrogate);
    let mut n_queries = 1usize;
    let reexplain = |d: &Document, n_queries: &mut usize| -> Explanation {
        let seed = cfg.seed.wrapping_add(*n_queries as u64);
        *n_queries += 1;
        explain(d, model, &surrogate.with_seed(seed))
    };

    let initial = if cfg.reexplain_initial {
        let fresh = reexplain(doc, &mut n_queries);
        similarity(&cfg.measure, &original, &fresh)?.value()
    } else {
        1.0
    };
    let label = model.predict(doc).argmax();
    let budget = cfg.budget(doc.len());

    let mut current = doc.clone();
    let mut current_sim = initial;
    let mut perturbations = Vec::new();
    let mut trace = Vec::new();
    let mut success = current_sim <= cfg.tau;

    if !success {
        for index in importance_order(doc, model, &cfg.stopwords) {
            if perturbations.len() >= budget {
                break;
            }
            let mut best: Option<(Feature, f64, Document)> = None;
            for candidate in filter_candidates(&current, index, provider, cfg, model, label) {
                let trial = current.with_replacement(index, &candidate);
                let e = reexplain(&trial, &mut n_queries);
                let s = similarity(&cfg.measure, &original, &e)?.value();
                if best.as_ref().is_none_or(|b| s < b.1) {
                    best = Some((candidate, s, trial));
                }
            }
            let Some((replacement, s, trial)) = best else {
                continue;
            };
            if s < current_sim {
                perturbations.push(Perturbation {
                    index,
                    original: doc.tokens()[index].clone(),
                    replacement,
                });
                current = trial;
                current_sim = s;
                trace.push(s);
                if s <= cfg.tau {
                    success = true;
                    break;
                }
            }
        }
    }

    Ok(AttackResult {
        success,
        initial_similarity: initial,
        final_similarity: current_sim,
        perturbed_doc: current,
        perturbations,
        n_queries,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explainer::LexiconClassifier;
    use crate::MeasureKind;

    fn f(s: &str) -> Feature {
        Feature::new(s).unwrap()
    }

    fn model(words: &[(&str, f64)]) -> LexiconClassifier<f64> {
        let mut m = LexiconClassifier::new(&[0, 1]).unwrap();
        for &(w, s) in words {
            m.set_score(1, f(w), s).unwrap();
        }
        m
    }

    #[test]
    fn budget_rounds_up() {
        let cfg = AttackConfig::default();
        assert_eq!(cfg.budget(10), 2);
        assert_eq!(cfg.budget(11), 3);
        assert_eq!(cfg.budget(1), 1);
        let cfg = AttackConfig {
            max_perturb_frac: 0.1,
            ..AttackConfig::default()
        };
        assert_eq!(cfg.budget(30), 3);
    }

    #[test]
    fn importance_ties_keep_index_order() {
        let m = model(&[]);
        let doc = Document::new("a b c d").unwrap();
        assert_eq!(importance_order(&doc, &m, &HashSet::new()), [0, 1, 2, 3]);
        assert_eq!(
            importance_order(&Document::new("x").unwrap(), &m, &HashSet::new()),
            [0]
        );
    }

    #[test]
    fn important_word_comes_last() {
        let m = model(&[("superb", 4.0), ("nice", 0.5)]);
        let doc = Document::new("superb cast and a nice plot").unwrap();
        let order = importance_order(&doc, &m, &HashSet::new());
        assert_eq!(*order.last().unwrap(), 0);
        assert_eq!(order[order.len() - 2], 4);
        let stop: HashSet<Feature> = [f("and"), f("a")].into_iter().collect();
        let order = importance_order(&doc, &m, &stop);
        assert!(!order.contains(&2) && !order.contains(&3));
    }

    #[test]
    fn candidate_filters() {
        let m = model(&[("great", 1.0), ("fine", 0.2), ("awful", -5.0)]);
        let doc = Document::new("great show").unwrap();
        let cfg = AttackConfig {
            stopwords: [f("the")].into_iter().collect(),
            ..AttackConfig::default()
        };
        assert!(filter_candidates(&doc, 0, &NoSynonyms, &cfg, &m, 1).is_empty());
        let table = SynonymTable::parse("great\tawful,fine,the,great\n").unwrap();
        let got = filter_candidates(&doc, 0, &table, &cfg, &m, 1);
        assert_eq!(got, vec![f("fine")]);
        let emb = EmbeddingIndex::parse("great 1 0\nfine 1 0.1\nnice 0.4 0.9165\n").unwrap();
        let got = filter_candidates(&doc, 0, &emb, &cfg, &m, 1);
        assert_eq!(got, vec![f("fine")]);
    }

    #[test]
    fn empty_provider_fails_cleanly() {
        let m = model(&[("great", 2.0)]);
        let doc = Document::new("a great film").unwrap();
        let r = greedy_attack(
            &doc,
            &m,
            &SurrogateConfig::default(),
            &AttackConfig::default(),
            &NoSynonyms,
        )
        .unwrap();
        assert!(!r.success);
        assert!(r.perturbations.is_empty());
        assert_eq!(r.final_similarity, 1.0);
        assert_eq!(r.n_queries, 1);
        assert_eq!(r.perturbed_doc, doc);
    }

    #[test]
    fn fresh_initial_similarity_can_succeed_without_perturbing() {
        let m = model(&[
            ("a", 0.01),
            ("b", 0.01),
            ("c", 0.01),
            ("d", 0.01),
            ("e", 0.01),
        ]);
        let doc = Document::new("a b c d e").unwrap();
        let cfg = AttackConfig {
            measure: MeasureSpec::new(MeasureKind::Kendall),
            tau: 0.999,
            reexplain_initial: true,
            ..AttackConfig::default()
        };
        let r = greedy_attack(&doc, &m, &SurrogateConfig::default(), &cfg, &NoSynonyms).unwrap();
        assert!(r.success);
        assert!(r.perturbations.is_empty());
        assert_eq!(r.n_queries, 2);
        assert!(r.initial_similarity < 0.999);
    }

    #[test]
    fn planted_synonym_flips_top_feature() {
        let m = model(&[("great", 5.0), ("decent", -0.1), ("fun", 1.0)]);
        let doc = Document::new("the movie was great and fun").unwrap();
        let table = SynonymTable::parse("great\tdecent\n").unwrap();
        let cfg = AttackConfig {
            tau: 0.6,
            ..AttackConfig::default()
        };
        let r = greedy_attack(&doc, &m, &SurrogateConfig::default(), &cfg, &table).unwrap();
        assert!(r.success, "{r:?}");
        assert_eq!(r.perturbations.len(), 1);
        assert_eq!(r.perturbations[0].replacement, f("decent"));
        assert!(r.final_similarity < 0.6);
        assert_eq!(m.predict(&r.perturbed_doc).argmax(), 1);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let m = model(&[]);
        let doc = Document::new("x").unwrap();
        for cfg in [
            AttackConfig {
                tau: 1.0,
                ..AttackConfig::default()
            },
            AttackConfig {
                max_perturb_frac: 0.0,
                ..AttackConfig::default()
            },
            AttackConfig {
                n_neighbors: 0,
                ..AttackConfig::default()
            },
        ] {
            assert!(
                greedy_attack(&doc, &m, &SurrogateConfig::default(), &cfg, &NoSynonyms).is_err()
            );
        }
    }
}
