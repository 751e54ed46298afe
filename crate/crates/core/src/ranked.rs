//! Documents, ranked explanations and their text formats.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A single whitespace-delimited word, case preserved.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Feature(String);

impl Feature {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty() {
            return Err(Error::InvalidExplanation("empty feature".into()));
        }
        if token.chars().any(char::is_whitespace) {
            return Err(Error::InvalidExplanation(format!(
                "feature {token:?} contains whitespace"
            )));
        }
        Ok(Feature(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Feature {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Canonical rank order: larger absolute weight first, ties by feature text.
fn canonical_cmp<T: Scalar>(a: &(Feature, T), b: &(Feature, T)) -> Ordering {
    b.1.abs()
        .partial_cmp(&a.1.abs())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

/// An ordered list of unique `(feature, weight)` pairs, most important first.
///
/// The order is canonical: non-increasing `|weight|`, ties broken by
/// ascending feature text. Rank `k` is the 0-based index into [`entries`].
///
/// [`entries`]: RankedExplanation::entries
#[derive(Clone, Debug)]
pub struct RankedExplanation<T> {
    entries: Vec<(Feature, T)>,
    index: HashMap<Feature, usize>,
}

impl<T: PartialEq> PartialEq for RankedExplanation<T> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<T: Scalar> RankedExplanation<T> {
    /// Builds an explanation from unordered entries, sorting them canonically.
    pub fn new(mut entries: Vec<(Feature, T)>) -> Result<Self> {
        validate_weights(&entries)?;
        entries.sort_by(canonical_cmp);
        Self::with_index(entries)
    }

    /// Builds an explanation from entries that must already be in canonical order.
    pub fn from_ranked(entries: Vec<(Feature, T)>) -> Result<Self> {
        validate_weights(&entries)?;
        if let Some(k) = entries
            .windows(2)
            .position(|w| canonical_cmp(&w[0], &w[1]) == Ordering::Greater)
        {
            return Err(Error::InvalidExplanation(format!(
                "entry {} ({}) is out of rank order",
                k + 1,
                entries[k + 1].0
            )));
        }
        Self::with_index(entries)
    }

    fn with_index(entries: Vec<(Feature, T)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidExplanation("no entries".into()));
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (k, (f, _)) in entries.iter().enumerate() {
            if index.insert(f.clone(), k).is_some() {
                return Err(Error::InvalidExplanation(format!("duplicate feature {f}")));
            }
        }
        Ok(RankedExplanation { entries, index })
    }

    pub fn entries(&self) -> &[(Feature, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn feature(&self, rank: usize) -> &Feature {
        &self.entries[rank].0
    }

    pub fn features(&self) -> impl Iterator<Item = &Feature> {
        self.entries.iter().map(|(f, _)| f)
    }

    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.iter().map(|&(_, w)| w)
    }

    /// 0-based rank of `f`, or `None` when the feature is absent.
    pub fn rank_of(&self, f: &Feature) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn contains(&self, f: &Feature) -> bool {
        self.index.contains_key(f)
    }

    /// Absolute weights normalized to sum to one.
    pub fn normalized_weights(&self) -> WeightVector<T> {
        normalize_weights(self)
    }

    /// Applies `g` to every weight and re-sorts. Used for scale experiments.
    pub fn map_weights(&self, g: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|(f, w)| (f.clone(), g(*w)))
                .collect(),
        )
    }
}

fn validate_weights<T: Scalar>(entries: &[(Feature, T)]) -> Result<()> {
    match entries.iter().find(|(_, w)| !w.is_finite()) {
        Some((f, w)) => Err(Error::InvalidExplanation(format!(
            "weight {w} of {f} is not finite"
        ))),
        None => Ok(()),
    }
}

/// Non-negative per-rank weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weight at `rank`, clamped to the last rank.
    pub fn at_clamped(&self, rank: usize) -> T {
        self.0[rank.min(self.0.len() - 1)]
    }
}

impl<T> std::ops::Index<usize> for WeightVector<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.0[k]
    }
}

/// `|w_k| / Σ|w_j|`, or uniform when every weight is zero.
pub fn normalize_weights<T: Scalar>(expl: &RankedExplanation<T>) -> WeightVector<T> {
    let total: T = expl.weights().map(Float::abs).sum();
    let n = expl.len();
    if total == T::zero() {
        let u = T::one() / T::from_usize_lossy(n);
        return WeightVector(vec![u; n]);
    }
    WeightVector(expl.weights().map(|w| w.abs() / total).collect())
}

/// Parses the `feature<TAB>weight` format. Line order gives rank order.
pub fn parse_explanation<T: Scalar>(text: &str) -> Result<RankedExplanation<T>> {
    let mut entries: Vec<(Feature, T)> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(Error::parse(1, "empty explanation"));
    }
    for (k, line) in body.split('\n').enumerate() {
        let lineno = k + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let (name, weight) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected feature<TAB>weight"))?;
        if weight.contains('\t') {
            return Err(Error::parse(lineno, "too many fields"));
        }
        let feature = Feature::new(name).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let weight: T = weight
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("non-numeric weight {weight:?}")))?;
        if !weight.is_finite() {
            return Err(Error::parse(lineno, format!("non-finite weight {weight}")));
        }
        if let Some(prev) = seen.insert(name.to_string(), lineno) {
            return Err(Error::parse(
                lineno,
                format!("duplicate feature {name:?} (first on line {prev})"),
            ));
        }
        if let Some(last) = entries.last() {
            if canonical_cmp(last, &(feature.clone(), weight)) == Ordering::Greater {
                return Err(Error::parse(lineno, "entry out of rank order"));
            }
        }
        entries.push((feature, weight));
    }
    RankedExplanation::from_ranked(entries)
}

pub fn serialize_explanation<T: Scalar>(expl: &RankedExplanation<T>) -> String {
    let mut out = String::new();
    for (f, w) in expl.entries() {
        out.push_str(f.as_str());
        out.push('\t');
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

/// A whitespace-tokenized text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    tokens: Vec<Feature>,
    raw: String,
}

impl Document {
    pub fn new(raw: impl Into<String>) -> Result<Self> {
        let raw = raw.into();
        let tokens: Vec<Feature> = raw
            .split_whitespace()
            .map(|t| Feature(t.to_string()))
            .collect();
        if tokens.is_empty() {
            return Err(Error::InvalidDocument("no tokens".into()));
        }
        Ok(Document { tokens, raw })
    }

    /// Builds a document whose raw text is the tokens joined by single spaces.
    pub fn from_tokens(tokens: Vec<Feature>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidDocument("no tokens".into()));
        }
        let raw = tokens
            .iter()
            .map(Feature::as_str)
            .collect::<Vec<_>>()
            .join(" ");
        Ok(Document { tokens, raw })
    }

    pub fn tokens(&self) -> &[Feature] {
        &self.tokens
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unique words in order of first appearance.
    pub fn vocabulary(&self) -> Vec<Feature> {
        let mut seen = std::collections::HashSet::new();
        self.tokens
            .iter()
            .filter(|t| seen.insert(*t))
            .cloned()
            .collect()
    }

    /// Copy of this document with the token at `index` replaced.
    pub fn with_replacement(&self, index: usize, word: &Feature) -> Document {
        let mut tokens = self.tokens.clone();
        tokens[index] = word.clone();
        Document::from_tokens(tokens).expect("non-empty")
    }
}

/// A corpus line: `label<TAB>raw text`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDocument {
    pub id: usize,
    pub label: u32,
    pub doc: Document,
}

/// Parses a corpus file. Blank lines are skipped; ids count records from 0.
pub fn parse_corpus(text: &str) -> Result<Vec<LabeledDocument>> {
    let mut docs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (label, raw) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected label<TAB>text"))?;
        let label: u32 = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad label {label:?}")))?;
        let doc = Document::new(raw).map_err(|e| Error::parse(lineno, e.to_string()))?;
        docs.push(LabeledDocument {
            id: docs.len(),
            label,
            doc,
        });
    }
    if docs.is_empty() {
        return Err(Error::Empty("corpus has no documents".into()));
    }
    Ok(docs)
}

/// Class probabilities keyed by small integer class ids, sorted by id.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelDistribution<T> {
    probs: Vec<(u32, T)>,
}

impl<T: Scalar> LabelDistribution<T> {
    pub fn new(mut probs: Vec<(u32, T)>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution("fewer than 2 classes".into()));
        }
        probs.sort_by_key(|&(c, _)| c);
        if probs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution("duplicate class id".into()));
        }
        if probs
            .iter()
            .any(|&(_, p)| !(p >= T::zero() && p <= T::one()))
        {
            return Err(Error::InvalidDistribution(
                "probability outside [0,1]".into(),
            ));
        }
        let total: T = probs.iter().map(|&(_, p)| p).sum();
        let tol = T::lit(1e-9).max(T::epsilon() * T::from_usize_lossy(4 * probs.len()));
        if (total - T::one()).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(LabelDistribution { probs })
    }

    pub fn probabilities(&self) -> &[(u32, T)] {
        &self.probs
    }

    pub fn prob(&self, class: u32) -> T {
        self.probs
            .iter()
            .find(|&&(c, _)| c == class)
            .map_or(T::zero(), |&(_, p)| p)
    }

    /// Most probable class; ties go to the smallest id.
    pub fn argmax(&self) -> u32 {
        let mut best = self.probs[0];
        for &(c, p) in &self.probs[1..] {
            if p > best.1 {
                best = (c, p);
            }
        }
        best.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Feature {
        Feature::new(s).unwrap()
    }

    fn expl(pairs: &[(&str, f64)]) -> RankedExplanation<f64> {
        RankedExplanation::new(pairs.iter().map(|&(s, w)| (f(s), w)).collect()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let w = normalize_weights(&expl(&[("a", 0.25), ("b", 0.10), ("c", 0.05)]));
        let expected = [0.625, 0.25, 0.125];
        for (got, want) in w.as_slice().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(normalize_weights(&expl(&[("x", 1.77)])).as_slice(), &[1.0]);
        assert_eq!(
            normalize_weights(&expl(&[("a", 0.0), ("b", 0.0)])).as_slice(),
            &[0.5, 0.5]
        );
    }

    #[test]
    fn rank_lookup() {
        let e = expl(&[("a", 3.0), ("b", 2.0), ("c", 1.0)]);
        assert_eq!(e.rank_of(&f("b")), Some(1));
        assert_eq!(e.rank_of(&f("z")), None);
        assert_eq!(expl(&[("a", 1.0)]).rank_of(&f("a")), Some(0));
    }

    #[test]
    fn canonical_order_with_ties_and_signs() {
        let e = expl(&[("b", 0.5), ("a", -0.5), ("c", 0.9)]);
        let names: Vec<_> = e.features().map(Feature::as_str).collect();
        assert_eq!(names, ["c", "a", "b"]);
    }

    #[test]
    fn parse_table_rows() {
        let e: RankedExplanation<f64> = parse_explanation("heartburn\t1.77\neat\t0.59").unwrap();
        assert_eq!(e.entries(), &[(f("heartburn"), 1.77), (f("eat"), 0.59)]);
        assert_eq!(serialize_explanation(&e), "heartburn\t1.77\neat\t0.59\n");
    }

    #[test]
    fn parse_rejections_name_the_line() {
        let cases = [
            ("word\tNaN", 1),
            ("a\t1\nb\tx", 2),
            ("a\t1\na\t0.5", 2),
            ("a\t1\nb", 2),
            ("a\t0.1\nb\t0.9", 2),
            ("a\t1\n\nb\t0.5", 2),
            ("a\t1\tc", 1),
            ("a\tinf", 1),
        ];
        for (text, line) in cases {
            match parse_explanation::<f64>(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn f32_explanations_round_trip() {
        let e: RankedExplanation<f32> = parse_explanation("a\t0.1\nb\t-0.05\n").unwrap();
        assert_eq!(
            parse_explanation::<f32>(&serialize_explanation(&e)).unwrap(),
            e
        );
    }

    #[test]
    fn feature_rejects_whitespace() {
        assert!(Feature::new("").is_err());
        assert!(Feature::new("a b").is_err());
    }

    #[test]
    fn document_tokenization() {
        let d = Document::new("I  love\tit, love").unwrap();
        let toks: Vec<_> = d.tokens().iter().map(Feature::as_str).collect();
        assert_eq!(toks, ["I", "love", "it,", "love"]);
        assert_eq!(d.vocabulary().len(), 3);
        assert!(Document::new("   ").is_err());
    }

    #[test]
    fn corpus_parsing() {
        let docs = parse_corpus("1\tgood movie\n\n0\tbad film\n").unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].id, 1);
        assert_eq!(docs[1].label, 0);
        assert!(matches!(
            parse_corpus("x\tgood"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_corpus("\n").is_err());
    }

    #[test]
    fn label_distribution_rules() {
        let d = LabelDistribution::new(vec![(1, 0.25), (0, 0.75)]).unwrap();
        assert_eq!(d.argmax(), 0);
        assert_eq!(d.prob(1), 0.25);
        assert!(LabelDistribution::new(vec![(0, 1.0)]).is_err());
        assert!(LabelDistribution::new(vec![(0, 0.5), (1, 0.6)]).is_err());
        let tie = LabelDistribution::new(vec![(3, 0.5), (2, 0.5)]).unwrap();
        assert_eq!(tie.argmax(), 2);
    }
}
