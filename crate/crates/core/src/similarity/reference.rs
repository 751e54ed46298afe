//! Straightforward re-implementations of every measure, written directly
//! from their definitions and kept separate from the main code path.
//! Quadratic and allocation-heavy; meant for cross-checking in tests.

use std::collections::BTreeSet;

use super::{footrule_max_bruteforce, MeasureKind, MeasureSpec, Normalization, SimilarityValue};
use crate::error::Result;
use crate::ranked::RankedExplanation;
use crate::scalar::Scalar;

struct Plain<T> {
    names: Vec<String>,
    weights: Vec<T>,
}

impl<T: Scalar> Plain<T> {
    fn of(e: &RankedExplanation<T>) -> Self {
        Plain {
            names: e
                .entries()
                .iter()
                .map(|(f, _)| f.as_str().to_string())
                .collect(),
            weights: e.entries().iter().map(|&(_, w)| w).collect(),
        }
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn prefix(&self, depth: usize) -> BTreeSet<&str> {
        self.names.iter().take(depth).map(String::as_str).collect()
    }

    /// Absolute weights over their sum, uniform when all are zero.
    fn rank_weights(&self) -> Vec<T> {
        let mut total = T::zero();
        for w in &self.weights {
            total = total + w.abs();
        }
        let n = T::from_usize_lossy(self.weights.len());
        self.weights
            .iter()
            .map(|w| {
                if total == T::zero() {
                    T::one() / n
                } else {
                    w.abs() / total
                }
            })
            .collect()
    }
}

fn usize_to<T: Scalar>(n: usize) -> T {
    T::from_usize_lossy(n)
}

/// Mirrors [`super::similarity`] through independent code.
#[allow(clippy::needless_range_loop)]
pub fn naive_reference<T: Scalar>(
    spec: &MeasureSpec<T>,
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
) -> Result<SimilarityValue<T>> {
    spec.validate()?;
    let a = Plain::of(a);
    let b = Plain::of(b);
    let n = a.names.len();
    let penalty = spec.penalty.unwrap_or(usize_to::<T>(n) / T::lit(2.0));
    let value = match spec.kind {
        MeasureKind::Jaccard => {
            let sa = a.prefix(n);
            let sb = b.prefix(b.names.len());
            let inter = sa.intersection(&sb).count();
            let union = sa.union(&sb).count();
            usize_to::<T>(inter) / usize_to::<T>(union)
        }
        MeasureKind::JaccardWeighted => {
            let w = a.rank_weights();
            let mut num = T::zero();
            let mut den = T::zero();
            for (i, name) in a.names.iter().enumerate() {
                den = den + w[i];
                if b.position(name).is_some() {
                    num = num + w[i];
                }
            }
            for (j, name) in b.names.iter().enumerate() {
                if a.position(name).is_none() {
                    den = den + w[if j < n { j } else { n - 1 }];
                }
            }
            num / den
        }
        MeasureKind::Kendall => {
            let longest = n.max(b.names.len());
            let mut dissonant = 0;
            for i in 0..longest {
                if a.names.get(i) != b.names.get(i) {
                    dissonant += 1;
                }
            }
            T::one() - usize_to::<T>(dissonant) / usize_to::<T>(longest)
        }
        MeasureKind::KendallWeighted => {
            let w = a.rank_weights();
            let mut distance = T::zero();
            for i in 0..n {
                if b.names.get(i) != Some(&a.names[i]) {
                    distance = distance + w[i];
                }
            }
            T::one() - distance
        }
        MeasureKind::Spearman => {
            let mut distance = T::zero();
            for (i, name) in a.names.iter().enumerate() {
                distance = distance
                    + match b.position(name) {
                        Some(j) => usize_to::<T>(i.max(j) - i.min(j)),
                        None => penalty,
                    };
            }
            let bound = match spec.normalization {
                Normalization::PaperBound => T::floor(usize_to::<T>(n * n) / T::lit(2.0)),
                Normalization::BruteforceBound => footrule_max_bruteforce(n, penalty)?,
            };
            degenerate_ratio(distance, bound)
        }
        MeasureKind::SpearmanWeighted => {
            let w = a.rank_weights();
            let mut distance = T::zero();
            let mut bound = T::zero();
            for (i, name) in a.names.iter().enumerate() {
                let d = match b.position(name) {
                    Some(j) => usize_to::<T>(i.max(j) - i.min(j)),
                    None => penalty,
                };
                distance = distance + w[i] * d;
                let farthest = usize_to::<T>(i).max(usize_to::<T>(n - 1 - i));
                let farthest = if spec.normalization == Normalization::BruteforceBound {
                    farthest.max(penalty)
                } else {
                    farthest
                };
                bound = bound + w[i] * farthest;
            }
            degenerate_ratio(distance, bound)
        }
        MeasureKind::Rbo => {
            let p = spec.persistence;
            let d = n.max(b.names.len());
            let overlap = |i: usize| a.prefix(i).intersection(&b.prefix(i)).count();
            let mut series = T::zero();
            for i in 1..=d {
                series = series + p.powi(i as i32) * usize_to::<T>(overlap(i)) / usize_to::<T>(i);
            }
            usize_to::<T>(overlap(d)) / usize_to::<T>(d) * p.powi(d as i32)
                + (T::one() - p) / p * series
        }
    };
    Ok(SimilarityValue::clamped(value))
}

fn degenerate_ratio<T: Scalar>(distance: T, bound: T) -> T {
    if bound == T::zero() {
        if distance == T::zero() {
            T::one()
        } else {
            T::zero()
        }
    } else {
        T::one() - distance / bound
    }
}
