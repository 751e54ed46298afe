use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub const RUN_RECORD_HEADER: &str =
    "doc_id,measure,tau,success,final_similarity,n_perturbed,perturb_rate,n_queries,seed,quality_score";
pub const AGGREGATE_HEADER: &str =
    "measure,tau,success_rate,mean_sim,median_sim,mean_perturb_rate,n_docs";

/// Outcome of one attack cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub doc_id: usize,
    pub measure: String,
    pub tau: f64,
    pub success: bool,
    pub final_similarity: f64,
    pub n_perturbed: usize,
    pub perturb_rate: f64,
    pub n_queries: usize,
    pub seed: u64,
    pub quality_score: f64,
}

/// Aggregate over one (measure, tau) group. Similarity and rate statistics
/// cover successful attacks only and are `None` when there were none.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub measure: String,
    pub tau: f64,
    pub success_rate: f64,
    pub mean_sim: Option<f64>,
    pub median_sim: Option<f64>,
    pub mean_perturb_rate: Option<f64>,
    pub n_docs: usize,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Groups by `(measure, tau)`; output is sorted by measure label then tau.
pub fn aggregate(records: &[RunRecord]) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::Empty("no run records to aggregate".into()));
    }
    // tau is positive, so its bit pattern sorts like its value
    let mut groups: BTreeMap<(&str, u64), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((&r.measure, r.tau.to_bits()))
            .or_default()
            .push(r);
    }
    Ok(groups
        .into_iter()
        .map(|((measure, tau_bits), rows)| {
            let wins: Vec<&&RunRecord> = rows.iter().filter(|r| r.success).collect();
            let mut sims: Vec<f64> = wins.iter().map(|r| r.final_similarity).collect();
            let mut rates: Vec<f64> = wins.iter().map(|r| r.perturb_rate).collect();
            // fixed summation order regardless of record order
            sims.sort_by(f64::total_cmp);
            rates.sort_by(f64::total_cmp);
            AggregateRow {
                measure: measure.to_string(),
                tau: f64::from_bits(tau_bits),
                success_rate: wins.len() as f64 / rows.len() as f64,
                mean_sim: mean(&sims),
                median_sim: median(&sims),
                mean_perturb_rate: mean(&rates),
                n_docs: rows.len(),
            }
        })
        .collect())
}

pub fn render_run_records_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RUN_RECORD_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{:.6},{},{:.6},{},{:.6},{},{},{:.6}\n",
            r.doc_id,
            r.measure,
            r.tau,
            r.success,
            r.final_similarity,
            r.n_perturbed,
            r.perturb_rate,
            r.n_queries,
            r.seed,
            r.quality_score
        ));
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

pub fn render_aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{},{},{},{}\n",
            r.measure,
            r.tau,
            r.success_rate,
            opt(r.mean_sim),
            opt(r.median_sim),
            opt(r.mean_perturb_rate),
            r.n_docs
        ));
    }
    out
}

/// Reads the run-record CSV back.
pub fn parse_run_records(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RUN_RECORD_HEADER => {}
        _ => return Err(Error::parse(1, "missing or wrong run-record header")),
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::parse(
                lineno,
                format!("expected 10 fields, got {}", f.len()),
            ));
        }
        let bad = |name: &str| Error::parse(lineno, format!("bad {name}"));
        let real = |s: &str, name: &str| s.parse::<f64>().map_err(|_| bad(name));
        out.push(RunRecord {
            doc_id: f[0].parse().map_err(|_| bad("doc_id"))?,
            measure: f[1].to_string(),
            tau: real(f[2], "tau")?,
            success: match f[3] {
                "true" => true,
                "false" => false,
                _ => return Err(bad("success")),
            },
            final_similarity: real(f[4], "final_similarity")?,
            n_perturbed: f[5].parse().map_err(|_| bad("n_perturbed"))?,
            perturb_rate: real(f[6], "perturb_rate")?,
            n_queries: f[7].parse().map_err(|_| bad("n_queries"))?,
            seed: f[8].parse().map_err(|_| bad("seed"))?,
            quality_score: real(f[9], "quality_score")?,
        });
    }
    Ok(out)
}
