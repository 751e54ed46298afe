use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ranked::Feature;

/// Source of replacement candidates for a word.
pub trait SynonymProvider: Send + Sync {
    /// Up to `n` candidates ordered by non-increasing score, never `word` itself.
    fn candidates(&self, word: &Feature, n: usize) -> Vec<(Feature, f64)>;
}

impl<P: SynonymProvider + ?Sized> SynonymProvider for &P {
    fn candidates(&self, word: &Feature, n: usize) -> Vec<(Feature, f64)> {
        (**self).candidates(word, n)
    }
}

/// A provider that never proposes anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoSynonyms;

impl SynonymProvider for NoSynonyms {
    fn candidates(&self, _: &Feature, _: usize) -> Vec<(Feature, f64)> {
        Vec::new()
    }
}

/// Static `word -> [synonyms]` table; every synonym scores 1.0 and keeps
/// its table order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SynonymTable {
    entries: HashMap<Feature, Vec<Feature>>,
}

impl SynonymTable {
    pub fn insert(&mut self, word: Feature, synonyms: Vec<Feature>) {
        self.entries.insert(word, synonyms);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `word<TAB>syn1,syn2,...` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = SynonymTable::default();
        for (k, line) in text.lines().enumerate() {
            let lineno = k + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (word, list) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(lineno, "expected word<TAB>syn1,syn2,..."))?;
            let word = Feature::new(word).map_err(|e| Error::parse(lineno, e.to_string()))?;
            let synonyms = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| Feature::new(s).map_err(|e| Error::parse(lineno, e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if table.entries.contains_key(&word) {
                return Err(Error::parse(lineno, format!("duplicate entry for {word}")));
            }
            table.entries.insert(word, synonyms);
        }
        Ok(table)
    }
}

impl SynonymProvider for SynonymTable {
    fn candidates(&self, word: &Feature, n: usize) -> Vec<(Feature, f64)> {
        self.entries.get(word).map_or_else(Vec::new, |syns| {
            syns.iter()
                .filter(|s| *s != word)
                .take(n)
                .map(|s| (s.clone(), 1.0))
                .collect()
        })
    }
}

/// Word vectors with cosine nearest-neighbor lookup over the whole vocabulary.
#[derive(Clone, Debug, Default)]
pub struct EmbeddingIndex {
    words: Vec<Feature>,
    /// Unit-normalized rows; zero vectors stay zero.
    unit: Vec<Vec<f64>>,
    lookup: HashMap<Feature, usize>,
}

impl EmbeddingIndex {
    pub fn new(rows: Vec<(Feature, Vec<f64>)>) -> Result<Self> {
        let mut index = EmbeddingIndex::default();
        let dim = rows.first().map_or(0, |r| r.1.len());
        for (word, v) in rows {
            if v.len() != dim {
                return Err(Error::Config(format!(
                    "vector for {word} has dimension {} (expected {dim})",
                    v.len()
                )));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let unit = if norm > 0.0 {
                v.iter().map(|x| x / norm).collect()
            } else {
                v
            };
            if index
                .lookup
                .insert(word.clone(), index.words.len())
                .is_some()
            {
                return Err(Error::Config(format!("duplicate embedding for {word}")));
            }
            index.words.push(word);
            index.unit.push(unit);
        }
        Ok(index)
    }

    /// Parses `word v1 v2 ... vk` lines with a fixed `k` per file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut dim = None;
        for (k, line) in text.lines().enumerate() {
            let lineno = k + 1;
            let mut parts = line.split(' ').filter(|s| !s.is_empty());
            let Some(word) = parts.next() else { continue };
            let v = parts
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::parse(lineno, format!("bad component {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if v.is_empty() {
                return Err(Error::parse(lineno, "missing vector"));
            }
            match dim {
                None => dim = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(Error::parse(
                        lineno,
                        format!("dimension {} differs from {d}", v.len()),
                    ))
                }
                _ => {}
            }
            let word = Feature::new(word).map_err(|e| Error::parse(lineno, e.to_string()))?;
            rows.push((word, v));
        }
        Self::new(rows).map_err(|e| Error::parse(0, e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn cosine(&self, a: &Feature, b: &Feature) -> Option<f64> {
        let (i, j) = (*self.lookup.get(a)?, *self.lookup.get(b)?);
        Some(dot(&self.unit[i], &self.unit[j]))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SynonymProvider for EmbeddingIndex {
    fn candidates(&self, word: &Feature, n: usize) -> Vec<(Feature, f64)> {
        let Some(&q) = self.lookup.get(word) else {
            return Vec::new();
        };
        let mut scored: Vec<(usize, f64)> = (0..self.words.len())
            .filter(|&k| k != q)
            .map(|k| (k, dot(&self.unit[q], &self.unit[k])))
            .collect();
        scored.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.words[a.0].cmp(&self.words[b.0]))
        });
        scored
            .into_iter()
            .take(n)
            .map(|(k, s)| (self.words[k].clone(), s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Feature {
        Feature::new(s).unwrap()
    }

    #[test]
    fn table_keeps_order_and_excludes_query() {
        let t = SynonymTable::parse("great\tgood,great,fine,decent\nmovie\tfilm\n").unwrap();
        let c = t.candidates(&f("great"), 2);
        assert_eq!(c, vec![(f("good"), 1.0), (f("fine"), 1.0)]);
        assert!(t.candidates(&f("unknown"), 5).is_empty());
        assert!(SynonymTable::parse("great good").is_err());
        assert!(SynonymTable::parse("a\tb\na\tc").is_err());
    }

    #[test]
    fn embedding_neighbors_by_cosine() {
        let e = EmbeddingIndex::parse("good 1 0\nfine 0.9 0.1\nbad -1 0\nok 0.5 0.5\n").unwrap();
        let c = e.candidates(&f("good"), 3);
        let names: Vec<_> = c.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(names, ["fine", "ok", "bad"]);
        assert!(c.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!((c[2].1 + 1.0).abs() < 1e-12);
        assert!((e.cosine(&f("good"), &f("ok")).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn embedding_dimension_must_be_fixed() {
        assert!(matches!(
            EmbeddingIndex::parse("a 1 2\nb 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(EmbeddingIndex::parse("a 1 x\n").is_err());
    }
}
