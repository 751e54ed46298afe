use std::collections::HashMap;

use crate::ranked::Document;

fn trigrams(text: &str) -> HashMap<[char; 3], f64> {
    let chars: Vec<char> = text.chars().collect();
    let mut counts = HashMap::new();
    for w in chars.windows(3) {
        *counts.entry([w[0], w[1], w[2]]).or_insert(0.0) += 1.0;
    }
    counts
}

/// Cosine similarity of character-trigram counts of the two raw texts.
///
/// A cheap stand-in for sentence-encoder similarity. Texts too short to have
/// a trigram score 1.0 when equal and 0.0 otherwise.
pub fn quality_proxy(original: &Document, perturbed: &Document) -> f64 {
    let a = trigrams(original.raw());
    let b = trigrams(perturbed.raw());
    if a.is_empty() || b.is_empty() {
        return if original.raw() == perturbed.raw() {
            1.0
        } else {
            0.0
        };
    }
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let norm = |m: &HashMap<[char; 3], f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    (dot / (norm(&a) * norm(&b))).clamp(0.0, 1.0)
}
