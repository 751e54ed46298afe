use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ranksim::attack::greedy_attack;
use ranksim::config::{CliConfig, OneOrMany};
use ranksim::explainer::{explain, Classifier};
use ranksim::harness::{
    aggregate, instability_baseline, parse_run_records, render_aggregate_csv,
    render_run_records_csv, run_grid,
};
use ranksim::{
    parse_explanation, serialize_explanation, similarity, Document, Error, Explanation, Measure,
    MeasureKind, Normalization,
};

const THREADS_VAR: &str = "RANKSIM_THREADS";

/// Compare feature-attribution explanations and attack their stability.
#[derive(Parser, Debug)]
#[command(name = "ranksim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score two explanation files with one similarity measure.
    Measure {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        measure: String,
        /// RBO persistence.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Footrule penalty for features missing from B (default |A|/2).
        #[arg(long)]
        penalty: Option<f64>,
        #[arg(long, default_value = "paper_bound")]
        normalization: String,
    },
    /// Explain one document and print the explanation as TSV.
    Explain {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "doc_id", required_unless_present = "doc_id")]
        text: Option<String>,
        #[arg(long)]
        doc_id: Option<usize>,
    },
    /// Attack one corpus document with the first configured measure and tau.
    Attack {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        doc_id: usize,
    },
    /// Run the full grid and write runrecords.csv and aggregate.csv.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print seed-to-seed explanation similarity per measure.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Comma-separated measure names, or `all`.
    #[arg(long, value_delimiter = ',')]
    measure: Option<Vec<String>>,
}

impl Common {
    fn load(&self) -> Result<CliConfig, Error> {
        let mut cfg = CliConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(tau) = &self.tau {
            cfg.tau = Some(OneOrMany::Many(tau.clone()));
        }
        if let Some(measure) = &self.measure {
            cfg.measure = Some(OneOrMany::Many(measure.clone()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Usage(Error),
    Attack,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Attack) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Measure {
            a,
            b,
            measure,
            p,
            penalty,
            normalization,
        } => cmd_measure(&a, &b, &measure, p, penalty, &normalization),
        Command::Explain {
            common,
            text,
            doc_id,
        } => cmd_explain(&common, text, doc_id),
        Command::Attack { common, doc_id } => cmd_attack(&common, doc_id),
        Command::Experiment { common, output_dir } => cmd_experiment(&common, output_dir),
        Command::Baseline {
            common,
            repetitions,
        } => cmd_baseline(&common, repetitions),
    }
}

fn read_explanation(path: &Path) -> Result<Explanation, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_explanation(&text).map_err(|e| Error::File {
        path: path.to_path_buf(),
        source: Box::new(e),
    })
}

fn cmd_measure(
    a: &Path,
    b: &Path,
    measure: &str,
    p: f64,
    penalty: Option<f64>,
    normalization: &str,
) -> Result<(), Failure> {
    let kind: MeasureKind = measure.parse()?;
    let normalization: Normalization = normalization.parse()?;
    let mut spec = if kind == MeasureKind::Rbo {
        Measure::rbo(p)
    } else {
        Measure::new(kind).with_normalization(normalization)
    };
    if let Some(phi) = penalty {
        spec = spec.with_penalty(phi);
    }
    let a = read_explanation(a)?;
    let b = read_explanation(b)?;
    let value = similarity(&spec, &a, &b)?.value();
    emit(&format!("{value:.6}\n"))
}

fn document(cfg: &CliConfig, doc_id: usize) -> Result<Document, Error> {
    cfg.load_corpus()?
        .into_iter()
        .find(|d| d.id == doc_id)
        .map(|d| d.doc)
        .ok_or_else(|| Error::Config(format!("no document with id {doc_id}")))
}

fn cmd_explain(
    common: &Common,
    text: Option<String>,
    doc_id: Option<usize>,
) -> Result<(), Failure> {
    let cfg = common.load()?;
    let model = cfg.load_model()?;
    let doc = match (text, doc_id) {
        (Some(text), _) => Document::new(text)?,
        (None, Some(id)) => document(&cfg, id)?,
        (None, None) => return Err(Error::Config("pass --text or --doc-id".into()).into()),
    };
    let expl: Explanation = explain(&doc, &model, &cfg.surrogate());
    emit(&serialize_explanation(&expl))
}

fn cmd_attack(common: &Common, doc_id: usize) -> Result<(), Failure> {
    let cfg = common.load()?;
    let model = cfg.load_model()?;
    let provider = cfg.load_provider()?;
    let attack = cfg.attack()?;
    let doc = document(&cfg, doc_id)?;
    let result = greedy_attack(&doc, &model, &cfg.surrogate(), &attack, provider.as_ref())?;

    let mut out = String::new();
    let trace: Vec<String> = result.trace.iter().map(|s| format!("{s:.6}")).collect();
    let _ = writeln!(out, "doc_id: {doc_id}");
    let _ = writeln!(out, "measure: {}", attack.measure.label());
    let _ = writeln!(out, "tau: {:.6}", attack.tau);
    let _ = writeln!(out, "success: {}", result.success);
    let _ = writeln!(out, "initial_similarity: {:.6}", result.initial_similarity);
    let _ = writeln!(out, "final_similarity: {:.6}", result.final_similarity);
    let _ = writeln!(out, "n_perturbed: {}", result.perturbations.len());
    let _ = writeln!(out, "perturb_rate: {:.6}", result.perturb_rate());
    let _ = writeln!(out, "n_queries: {}", result.n_queries);
    let _ = writeln!(out, "label: {}", model.predict(&doc).argmax());
    let _ = writeln!(out, "trace: {}", trace.join(","));
    let _ = writeln!(out, "perturbed_text: {}", result.perturbed_doc.raw());
    let _ = writeln!(out, "perturbations:");
    for p in &result.perturbations {
        let _ = writeln!(out, "  {}\t{}\t{}", p.index, p.original, p.replacement);
    }
    emit(&out)?;
    if result.success {
        Ok(())
    } else {
        Err(Failure::Attack)
    }
}

fn threads_from_env() -> Result<Option<usize>, Error> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| {
                Error::Config(format!(
                    "{THREADS_VAR} must be a positive integer, got {v:?}"
                ))
            }),
    }
}

/// Writes through a sibling temp file and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn cmd_experiment(common: &Common, output_dir: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = common.load()?;
    let out_dir = match output_dir {
        Some(dir) => dir,
        None => cfg.output_dir()?.to_path_buf(),
    };
    let exp = cfg.experiment(threads_from_env()?)?;
    let records = run_grid(&exp)?;
    for r in &records {
        eprintln!(
            "doc {} {} tau={:.2} success={} sim={:.4}",
            r.doc_id, r.measure, r.tau, r.success, r.final_similarity
        );
    }
    let runs_csv = render_run_records_csv(&records);
    // aggregate from the emitted text so the summary depends on nothing else
    let reread = parse_run_records(&runs_csv)?;
    let aggregate_csv = render_aggregate_csv(&aggregate(&reread)?);

    fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
        path: out_dir.clone(),
        source,
    })?;
    write_atomic(&out_dir.join("runrecords.csv"), &runs_csv)?;
    write_atomic(&out_dir.join("aggregate.csv"), &aggregate_csv)?;
    Ok(())
}

fn cmd_baseline(common: &Common, repetitions: usize) -> Result<(), Failure> {
    let cfg = common.load()?;
    let exp = cfg.experiment(threads_from_env()?)?;
    let rows = instability_baseline(&exp, repetitions)?;
    let mut out = String::from("measure,mean,min,n_pairs\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{}",
            r.measure, r.mean, r.min, r.n_pairs
        );
    }
    emit(&out)
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
        .map_err(|source| {
            Failure::Usage(Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        })
}
