//! Batch attacks over a (document × measure × threshold) grid, CSV output
//! and the success / similarity / perturbation-rate aggregates.

mod quality;
mod records;

use std::sync::Arc;

use rayon::prelude::*;

pub use quality::quality_proxy;
pub use records::{
    aggregate, parse_run_records, render_aggregate_csv, render_run_records_csv, AggregateRow,
    RunRecord, AGGREGATE_HEADER, RUN_RECORD_HEADER,
};

use crate::attack::{greedy_attack, AttackConfig, SynonymProvider};
use crate::error::{Error, Result};
use crate::explainer::{inherent_instability, LexiconClassifier, SurrogateConfig};
use crate::ranked::LabeledDocument;
use crate::Measure;

pub const DEFAULT_TAUS: [f64; 4] = [0.3, 0.4, 0.5, 0.6];
pub const DEFAULT_PERSISTENCES: [f64; 3] = [0.5, 0.7, 0.9];

const DOC_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_MULTIPLIER: u64 = 0xBF58_476D_1CE4_E5B9;

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one stream of one document:
/// `splitmix64(base ^ doc·0x9E3779B97F4A7C15 ^ stream·0xBF58476D1CE4E5B9)`.
///
/// Stream 0 seeds the document's original explanation; stream `m + 1`
/// seeds the attack for measure `m`. Thresholds share the attack seed so
/// that a looser threshold replays the same greedy trace.
pub fn mix_seed(base: u64, doc_id: u64, stream: u64) -> u64 {
    splitmix64(base ^ doc_id.wrapping_mul(DOC_MULTIPLIER) ^ stream.wrapping_mul(STREAM_MULTIPLIER))
}

/// Everything a grid run needs, already loaded.
#[derive(Clone)]
pub struct Experiment {
    pub corpus: Vec<LabeledDocument>,
    pub model: LexiconClassifier<f64>,
    pub provider: Arc<dyn SynonymProvider>,
    pub surrogate: SurrogateConfig,
    /// Template for per-cell attack settings; `measure`, `tau` and `seed` are overwritten.
    pub attack: AttackConfig,
    pub grid: Vec<Measure>,
    pub taus: Vec<f64>,
    pub base_seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.corpus.is_empty() {
            return Err(Error::Empty("corpus has no documents".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("measure grid is empty".into()));
        }
        if self.taus.is_empty() {
            return Err(Error::Config("tau list is empty".into()));
        }
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::Config(format!("tau {t} outside (0,1)")));
        }
        for m in &self.grid {
            m.validate()?;
        }
        self.surrogate.validate()?;
        Ok(())
    }

    fn in_pool<R: Send>(&self, job: impl FnOnce() -> R + Send) -> Result<R> {
        match self.threads {
            None => Ok(job()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// One record per (document, measure, threshold), sorted by
/// `(doc_id, measure label, tau)`.
pub fn run_grid(exp: &Experiment) -> Result<Vec<RunRecord>> {
    exp.validate()?;
    let cells: Vec<(usize, usize, usize)> = (0..exp.corpus.len())
        .flat_map(|d| {
            (0..exp.grid.len()).flat_map(move |m| (0..exp.taus.len()).map(move |t| (d, m, t)))
        })
        .collect();
    let results = exp.in_pool(|| {
        cells
            .par_iter()
            .map(|&(d, m, t)| run_cell(exp, d, m, t))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut records = results;
    records.sort_by(|a, b| {
        a.doc_id
            .cmp(&b.doc_id)
            .then_with(|| a.measure.cmp(&b.measure))
            .then_with(|| a.tau.total_cmp(&b.tau))
    });
    Ok(records)
}

fn run_cell(exp: &Experiment, d: usize, m: usize, t: usize) -> Result<RunRecord> {
    let entry = &exp.corpus[d];
    let doc_id = entry.id as u64;
    let surrogate = exp.surrogate.with_seed(mix_seed(exp.base_seed, doc_id, 0));
    let seed = mix_seed(exp.base_seed, doc_id, m as u64 + 1);
    let cfg = AttackConfig {
        measure: exp.grid[m],
        tau: exp.taus[t],
        seed,
        ..exp.attack.clone()
    };
    let result = greedy_attack(
        &entry.doc,
        &exp.model,
        &surrogate,
        &cfg,
        exp.provider.as_ref(),
    )?;
    Ok(RunRecord {
        doc_id: entry.id,
        measure: exp.grid[m].label(),
        tau: cfg.tau,
        success: result.success,
        final_similarity: result.final_similarity,
        n_perturbed: result.perturbations.len(),
        perturb_rate: result.perturb_rate(),
        n_queries: result.n_queries,
        seed,
        quality_score: quality_proxy(&entry.doc, &result.perturbed_doc),
    })
}

/// Per-measure summary of seed-to-seed explanation variation.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineRow {
    pub measure: String,
    /// Mean over documents of the mean pairwise similarity.
    pub mean: f64,
    /// Smallest pairwise similarity seen on any document.
    pub min: f64,
    pub n_pairs: usize,
}

/// Runs each document's explanation `repetitions` times (seeds derived from
/// the document's stream 0) and summarizes pairwise similarity per measure.
pub fn instability_baseline(exp: &Experiment, repetitions: usize) -> Result<Vec<BaselineRow>> {
    exp.validate()?;
    if repetitions < 2 {
        return Err(Error::Config(
            "instability needs at least 2 repetitions".into(),
        ));
    }
    let per_doc = exp.in_pool(|| {
        exp.corpus
            .par_iter()
            .map(|entry| {
                let cfg = exp
                    .surrogate
                    .with_seed(mix_seed(exp.base_seed, entry.id as u64, 0));
                exp.grid
                    .iter()
                    .map(|spec| {
                        inherent_instability(&entry.doc, &exp.model, &cfg, repetitions, spec)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let n_docs = per_doc.len() as f64;
    Ok(exp
        .grid
        .iter()
        .enumerate()
        .map(|(m, spec)| BaselineRow {
            measure: spec.label(),
            mean: per_doc.iter().map(|d| d[m].mean).sum::<f64>() / n_docs,
            min: per_doc.iter().map(|d| d[m].min).fold(1.0, f64::min),
            n_pairs: per_doc.iter().map(|d| d[m].pairs.len()).sum(),
        })
        .collect())
}
