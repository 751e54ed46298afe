use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::ranked::{Document, Feature, LabelDistribution};
use crate::scalar::Scalar;

/// A deterministic text classifier.
pub trait Classifier<T: Scalar>: Send + Sync {
    /// Class distribution for a token sequence, which may be empty.
    fn predict_tokens(&self, tokens: &[Feature]) -> LabelDistribution<T>;

    fn predict(&self, doc: &Document) -> LabelDistribution<T> {
        self.predict_tokens(doc.tokens())
    }
}

impl<T: Scalar, C: Classifier<T> + ?Sized> Classifier<T> for &C {
    fn predict_tokens(&self, tokens: &[Feature]) -> LabelDistribution<T> {
        (**self).predict_tokens(tokens)
    }
}

pub const BIAS_KEY: &str = "__bias__";

/// Bag-of-words linear model: each class scores `bias + Σ word score` over
/// token occurrences; probabilities are the softmax of the class scores.
#[derive(Clone, Debug, PartialEq)]
pub struct LexiconClassifier<T> {
    classes: Vec<u32>,
    bias: Vec<T>,
    scores: HashMap<Feature, Vec<T>>,
}

impl<T: Scalar> LexiconClassifier<T> {
    pub fn new(classes: &[u32]) -> Result<Self> {
        let classes: Vec<u32> = classes
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if classes.len() < 2 {
            return Err(Error::Config("lexicon needs at least 2 classes".into()));
        }
        Ok(LexiconClassifier {
            bias: vec![T::zero(); classes.len()],
            classes,
            scores: HashMap::new(),
        })
    }

    fn slot(&self, class: u32) -> Result<usize> {
        self.classes
            .binary_search(&class)
            .map_err(|_| Error::Config(format!("unknown class {class}")))
    }

    pub fn set_score(&mut self, class: u32, word: Feature, score: T) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::Config(format!("score for {word} is not finite")));
        }
        let k = self.slot(class)?;
        let n = self.classes.len();
        self.scores
            .entry(word)
            .or_insert_with(|| vec![T::zero(); n])[k] = score;
        Ok(())
    }

    pub fn set_bias(&mut self, class: u32, bias: T) -> Result<()> {
        if !bias.is_finite() {
            return Err(Error::Config("bias is not finite".into()));
        }
        let k = self.slot(class)?;
        self.bias[k] = bias;
        Ok(())
    }

    pub fn with_score(mut self, class: u32, word: &str, score: T) -> Result<Self> {
        self.set_score(class, Feature::new(word)?, score)?;
        Ok(self)
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn score(&self, class: u32, word: &Feature) -> T {
        match (self.slot(class), self.scores.get(word)) {
            (Ok(k), Some(s)) => s[k],
            _ => T::zero(),
        }
    }

    /// Raw class scores before the softmax.
    pub fn class_scores(&self, tokens: &[Feature]) -> Vec<T> {
        let mut totals = self.bias.clone();
        for t in tokens {
            if let Some(s) = self.scores.get(t) {
                for (acc, v) in totals.iter_mut().zip(s) {
                    *acc = *acc + *v;
                }
            }
        }
        totals
    }

    /// Parses `class<TAB>word<TAB>score` lines; `__bias__` as the word sets a bias.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let lineno = k + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [class, word, score] = fields[..] else {
                return Err(Error::parse(lineno, "expected class<TAB>word<TAB>score"));
            };
            let class: u32 = class
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad class id {class:?}")))?;
            let score: T = score
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad score {score:?}")))?;
            if !score.is_finite() {
                return Err(Error::parse(lineno, "score is not finite"));
            }
            rows.push((lineno, class, word.to_string(), score));
        }
        let classes: Vec<u32> = rows.iter().map(|r| r.1).collect();
        let mut model = Self::new(&classes)?;
        let mut seen = HashMap::new();
        for (lineno, class, word, score) in rows {
            if let Some(prev) = seen.insert((class, word.clone()), lineno) {
                return Err(Error::parse(
                    lineno,
                    format!("duplicate entry for class {class} word {word:?} (line {prev})"),
                ));
            }
            if word == BIAS_KEY {
                model.set_bias(class, score)?;
            } else {
                let word = Feature::new(word).map_err(|e| Error::parse(lineno, e.to_string()))?;
                model.set_score(class, word, score)?;
            }
        }
        Ok(model)
    }
}

/// Numerically stable softmax.
pub fn softmax<T: Scalar>(scores: &[T]) -> Vec<T> {
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = scores.iter().map(|&s| (s - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

impl<T: Scalar> Classifier<T> for LexiconClassifier<T> {
    fn predict_tokens(&self, tokens: &[Feature]) -> LabelDistribution<T> {
        let probs = softmax(&self.class_scores(tokens));
        LabelDistribution::new(self.classes.iter().copied().zip(probs).collect())
            .expect("softmax is a valid distribution")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn good_model() -> LexiconClassifier<f64> {
        LexiconClassifier::new(&[0, 1])
            .unwrap()
            .with_score(0, "good", 1.0)
            .unwrap()
            .with_score(1, "good", -1.0)
            .unwrap()
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = LexiconClassifier::<f64>::new(&[0, 1]).unwrap();
        let d = m.predict(&Document::new("anything at all").unwrap());
        assert_eq!(d.probabilities(), &[(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn softmax_examples() {
        let m = good_model();
        let d = m.predict(&Document::new("good").unwrap());
        assert!((d.prob(0) - 0.880797077977882).abs() < 1e-12);
        assert!((d.prob(1) - 0.119202922022118).abs() < 1e-12);
        let d = m.predict(&Document::new("good good").unwrap());
        assert!((d.prob(0) - 0.982013790037908).abs() < 1e-12);
        assert!((d.prob(1) - 0.017986209962092).abs() < 1e-12);
    }

    #[test]
    fn empty_token_list_uses_bias() {
        let mut m = good_model();
        m.set_bias(1, 2.0).unwrap();
        assert_eq!(m.predict_tokens(&[]).argmax(), 1);
    }

    #[test]
    fn parse_lexicon_file() {
        let m: LexiconClassifier<f64> =
            LexiconClassifier::parse("0\tgood\t1\n1\tgood\t-1\n1\t__bias__\t0.5\n").unwrap();
        assert_eq!(m.classes(), &[0, 1]);
        assert_eq!(
            m.class_scores(&[Feature::new("good").unwrap()]),
            vec![1.0, -0.5]
        );
        assert!(LexiconClassifier::<f64>::parse("0\tgood\t1\n").is_err());
        assert!(matches!(
            LexiconClassifier::<f64>::parse("0\tgood\t1\n1\tbad\tx\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            LexiconClassifier::<f64>::parse("0\tgood\t1\n1\tbad\t1\n0\tgood\t2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
