//! Ranked-list similarity measures.
//!
//! Every measure compares an original explanation `a` against a perturbed
//! explanation `b` and returns a similarity in `[0, 1]`. Weighted variants
//! and footrule penalties are always derived from `a`, so the weighted and
//! penalized measures are asymmetric.

mod footrule;
mod measures;
pub mod reference;

use std::fmt;
use std::str::FromStr;

pub use footrule::{
    footrule_max_bruteforce, footrule_max_exact, footrule_max_penalized, reversal_pattern,
    BRUTEFORCE_LIMIT,
};
pub use measures::{
    footrule_distance, jaccard, jaccard_weighted, kendall, kendall_weighted, rbo, spearman,
    spearman_weighted,
};

use crate::error::{Error, Result};
use crate::ranked::RankedExplanation;
use crate::scalar::Scalar;

/// A similarity in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct SimilarityValue<T>(T);

impl<T: Scalar> SimilarityValue<T> {
    /// Wraps `value`, clamping rounding residue into `[0, 1]`.
    pub fn clamped(value: T) -> Self {
        SimilarityValue(value.max(T::zero()).min(T::one()))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn one() -> Self {
        SimilarityValue(T::one())
    }
}

impl<T: fmt::Display> fmt::Display for SimilarityValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Jaccard,
    JaccardWeighted,
    Kendall,
    KendallWeighted,
    Spearman,
    SpearmanWeighted,
    Rbo,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 7] = [
        MeasureKind::Jaccard,
        MeasureKind::JaccardWeighted,
        MeasureKind::Kendall,
        MeasureKind::KendallWeighted,
        MeasureKind::Spearman,
        MeasureKind::SpearmanWeighted,
        MeasureKind::Rbo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Jaccard => "jaccard",
            MeasureKind::JaccardWeighted => "jaccard_weighted",
            MeasureKind::Kendall => "kendall",
            MeasureKind::KendallWeighted => "kendall_weighted",
            MeasureKind::Spearman => "spearman",
            MeasureKind::SpearmanWeighted => "spearman_weighted",
            MeasureKind::Rbo => "rbo",
        }
    }

    pub fn is_footrule(self) -> bool {
        matches!(self, MeasureKind::Spearman | MeasureKind::SpearmanWeighted)
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "jaccard" => MeasureKind::Jaccard,
            "jaccard_weighted" | "jaccard_w" => MeasureKind::JaccardWeighted,
            "kendall" => MeasureKind::Kendall,
            "kendall_weighted" | "kendall_w" => MeasureKind::KendallWeighted,
            "spearman" | "footrule" => MeasureKind::Spearman,
            "spearman_weighted" | "spearman_w" => MeasureKind::SpearmanWeighted,
            "rbo" => MeasureKind::Rbo,
            _ => return Err(Error::InvalidMeasure(format!("unknown measure {s:?}"))),
        };
        Ok(kind)
    }
}

/// Denominator used to turn a footrule distance into a similarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    /// `⌊n²/2⌋`, the unpenalized maximum; larger distances clamp to 0.
    #[default]
    PaperBound,
    /// The exact maximum of the penalized distance for `|a|` and the penalty.
    BruteforceBound,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_bound" => Ok(Normalization::PaperBound),
            "bruteforce_bound" => Ok(Normalization::BruteforceBound),
            _ => Err(Error::InvalidMeasure(format!(
                "unknown normalization {s:?}"
            ))),
        }
    }
}

/// One measure plus its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureSpec<T> {
    pub kind: MeasureKind,
    /// RBO persistence `p`, used only by [`MeasureKind::Rbo`].
    pub persistence: T,
    /// Footrule penalty for features missing from `b`; `None` means `|a|/2`.
    pub penalty: Option<T>,
    pub normalization: Normalization,
}

impl<T: Scalar> MeasureSpec<T> {
    pub fn new(kind: MeasureKind) -> Self {
        MeasureSpec {
            kind,
            persistence: T::lit(0.5),
            penalty: None,
            normalization: Normalization::PaperBound,
        }
    }

    pub fn rbo(p: T) -> Self {
        MeasureSpec {
            persistence: p,
            ..Self::new(MeasureKind::Rbo)
        }
    }

    pub fn with_penalty(mut self, penalty: T) -> Self {
        self.penalty = Some(penalty);
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == MeasureKind::Rbo
            && !(self.persistence > T::zero() && self.persistence < T::one())
        {
            return Err(Error::InvalidMeasure(format!(
                "rbo persistence {} outside (0,1)",
                self.persistence
            )));
        }
        if let Some(phi) = self.penalty {
            if !phi.is_finite() || phi < T::zero() {
                return Err(Error::InvalidMeasure(format!(
                    "penalty {phi} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    /// Stable label used in CSV output, e.g. `kendall` or `rbo_0.7`.
    pub fn label(&self) -> String {
        match self.kind {
            MeasureKind::Rbo => format!("rbo_{}", self.persistence),
            kind => {
                let mut s = kind.name().to_string();
                if kind.is_footrule() {
                    if let Some(phi) = self.penalty {
                        s.push_str(&format!("_phi{phi}"));
                    }
                    if self.normalization == Normalization::BruteforceBound {
                        s.push_str("_bf");
                    }
                }
                s
            }
        }
    }

    /// The nine measures: six Jaccard/Kendall/Spearman variants plus one RBO per `p`.
    pub fn standard_grid(persistences: &[T]) -> Vec<Self> {
        let mut grid: Vec<Self> = MeasureKind::ALL[..6]
            .iter()
            .map(|&k| Self::new(k))
            .collect();
        grid.extend(persistences.iter().map(|&p| Self::rbo(p)));
        grid
    }

    pub(crate) fn penalty_for(&self, n: usize) -> T {
        self.penalty
            .unwrap_or_else(|| T::from_usize_lossy(n) / T::lit(2.0))
    }
}

impl<T: Scalar> fmt::Display for MeasureSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Routes to the measure selected by `spec`.
pub fn similarity<T: Scalar>(
    spec: &MeasureSpec<T>,
    a: &RankedExplanation<T>,
    b: &RankedExplanation<T>,
) -> Result<SimilarityValue<T>> {
    spec.validate()?;
    let value = match spec.kind {
        MeasureKind::Jaccard => jaccard(a, b),
        MeasureKind::JaccardWeighted => jaccard_weighted(a, b),
        MeasureKind::Kendall => kendall(a, b),
        MeasureKind::KendallWeighted => kendall_weighted(a, b),
        MeasureKind::Spearman => spearman(a, b, spec.penalty_for(a.len()), spec.normalization),
        MeasureKind::SpearmanWeighted => {
            spearman_weighted(a, b, spec.penalty_for(a.len()), spec.normalization)
        }
        MeasureKind::Rbo => rbo(a, b, spec.persistence),
    };
    Ok(value)
}
