use std::collections::HashSet;

use super::footrule::footrule_max_exact;
use super::{Normalization, SimilarityValue};
use crate::ranked::{Feature, RankedExplanation};
use crate::scalar::Scalar;

/// `|a ∩ b| / |a ∪ b|` over feature sets.
pub fn jaccard<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
) -> SimilarityValue<T> {
    let shared = b.features().filter(|f| a.contains(f)).count();
    let union = a.len() + b.len() - shared;
    SimilarityValue::clamped(T::from_usize_lossy(shared) / T::from_usize_lossy(union))
}

/// Jaccard with rank weights taken from `a`.
///
/// Shared features count with their weight in `a`. Features only in `b`
/// count with the weight `a` assigns to their rank in `b`, clamped to the
/// last rank of `a`.
pub fn jaccard_weighted<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
) -> SimilarityValue<T> {
    let w = a.normalized_weights();
    let mut shared = T::zero();
    let mut extra = T::zero();
    for (rank_b, f) in b.features().enumerate() {
        match a.rank_of(f) {
            Some(rank_a) => shared = shared + w[rank_a],
            None => extra = extra + w.at_clamped(rank_b),
        }
    }
    let total: T = w.as_slice().iter().copied().sum();
    SimilarityValue::clamped(shared / (total + extra))
}

/// Positional dissonance: mismatching positions plus the length gap,
/// divided by the longer length.
pub fn kendall<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
) -> SimilarityValue<T> {
    let common = a.len().min(b.len());
    let longest = a.len().max(b.len());
    let mismatches = a
        .features()
        .zip(b.features())
        .filter(|(x, y)| x != y)
        .count();
    let distance = mismatches + (longest - common);
    SimilarityValue::clamped(
        T::one() - T::from_usize_lossy(distance) / T::from_usize_lossy(longest),
    )
}

/// Positional dissonance weighted by `a`'s rank weights.
pub fn kendall_weighted<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
) -> SimilarityValue<T> {
    let w = a.normalized_weights();
    let common = a.len().min(b.len());
    let mut distance = T::zero();
    for (k, (x, y)) in a.features().zip(b.features()).enumerate() {
        if x != y {
            distance = distance + w[k];
        }
    }
    for k in common..a.len() {
        distance = distance + w[k];
    }
    SimilarityValue::clamped(T::one() - distance)
}

fn displacement<T: Scalar>(rank_a: usize, f: &Feature, b: &RankedExplanation<T>, penalty: T) -> T {
    match b.rank_of(f) {
        Some(rank_b) => T::from_usize_lossy(rank_a.abs_diff(rank_b)),
        None => penalty,
    }
}

/// `1 - distance/bound`, with a zero bound meaning "identical or nothing".
fn ratio_similarity<T: Scalar>(distance: T, bound: T) -> SimilarityValue<T> {
    if bound <= T::zero() {
        return if distance <= T::zero() {
            SimilarityValue::one()
        } else {
            SimilarityValue::clamped(T::zero())
        };
    }
    SimilarityValue::clamped(T::one() - distance / bound)
}

/// Raw footrule distance over the features of `a`; absent features cost `penalty`.
pub fn footrule_distance<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
    penalty: T,
) -> T {
    a.features()
        .enumerate()
        .map(|(rank_a, f)| displacement(rank_a, f, b, penalty))
        .sum()
}

/// Spearman's footrule normalized into a similarity.
pub fn spearman<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
    penalty: T,
    normalization: Normalization,
) -> SimilarityValue<T> {
    let distance = footrule_distance(a, b, penalty);
    let n = a.len();
    let bound = match normalization {
        Normalization::PaperBound => T::from_usize_lossy(n * n / 2),
        Normalization::BruteforceBound => footrule_max_exact(n, penalty),
    };
    ratio_similarity(distance, bound)
}

/// Footrule with each feature's displacement weighted by its weight in `a`.
///
/// The bound is `Σ w_k · max(k, n-1-k)`, each element's largest possible
/// displacement. Under [`Normalization::BruteforceBound`] the penalty also
/// enters each element's maximum.
pub fn spearman_weighted<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
    penalty: T,
    normalization: Normalization,
) -> SimilarityValue<T> {
    let w = a.normalized_weights();
    let n = a.len();
    let mut distance = T::zero();
    let mut bound = T::zero();
    for (k, f) in a.features().enumerate() {
        distance = distance + w[k] * displacement(k, f, b, penalty);
        let reach = T::from_usize_lossy(k.max(n - 1 - k));
        let reach = match normalization {
            Normalization::PaperBound => reach,
            Normalization::BruteforceBound => reach.max(penalty),
        };
        bound = bound + w[k] * reach;
    }
    ratio_similarity(distance, bound)
}

/// Rank-biased overlap at depth `d = max(|a|, |b|)`.
///
/// Prefixes deeper than a list are the whole list.
pub fn rbo<T: Scalar>(
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
    p: T,
) -> SimilarityValue<T> {
    let a = a.entries();
    let b = b.entries();
    let depth = a.len().max(b.len());
    let mut seen_a: HashSet<&Feature> = HashSet::with_capacity(a.len());
    let mut seen_b: HashSet<&Feature> = HashSet::with_capacity(b.len());
    let mut overlap = 0usize;
    let mut weight = T::one();
    let mut sum = T::zero();
    for i in 1..=depth {
        let x = a.get(i - 1).map(|(f, _)| f);
        let y = b.get(i - 1).map(|(f, _)| f);
        if let Some(x) = x {
            seen_a.insert(x);
            if seen_b.contains(x) {
                overlap += 1;
            }
        }
        if let Some(y) = y {
            seen_b.insert(y);
            if seen_a.contains(y) {
                overlap += 1;
            }
        }
        weight = weight * p;
        sum = sum + weight * T::from_usize_lossy(overlap) / T::from_usize_lossy(i);
    }
    let agreement = T::from_usize_lossy(overlap) / T::from_usize_lossy(depth);
    SimilarityValue::clamped(agreement * weight + (T::one() - p) / p * sum)
}
