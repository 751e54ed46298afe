//! TOML configuration shared by the command-line subcommands.
//!
//! ```toml
//! measure = ["kendall", "rbo"]   # or "all", or a single name
//! rbo_p = [0.5, 0.7, 0.9]
//! tau = [0.3, 0.4, 0.5, 0.6]
//! corpus = "corpus.tsv"          # relative to this file
//! lexicon = "lexicon.tsv"
//! synonyms = "synonyms.tsv"
//! output_dir = "out"
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::attack::{AttackConfig, EmbeddingIndex, NoSynonyms, SynonymProvider, SynonymTable};
use crate::error::{Error, Result};
use crate::explainer::{LexiconClassifier, SurrogateConfig};
use crate::harness::{Experiment, DEFAULT_PERSISTENCES, DEFAULT_TAUS};
use crate::ranked::{parse_corpus, Feature, LabeledDocument};
use crate::similarity::{MeasureKind, MeasureSpec, Normalization};
use crate::Measure;

#[derive(Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Raw configuration file contents. Unknown keys are rejected.
#[derive(Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub measure: Option<OneOrMany<String>>,
    pub rbo_p: Option<OneOrMany<f64>>,
    pub penalty: Option<f64>,
    pub normalization: Option<String>,
    pub tau: Option<OneOrMany<f64>>,
    pub max_perturb_frac: Option<f64>,
    pub n_neighbors: Option<usize>,
    pub min_embedding_sim: Option<f64>,
    pub n_samples: Option<usize>,
    pub kernel_width: Option<f64>,
    pub ridge_lambda: Option<f64>,
    pub seed: Option<u64>,
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl CliConfig {
    /// Reads and validates a config file. Relative paths resolve against
    /// the file's directory and every input path must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let mut cfg = Self::parse(&text).map_err(|e| e.in_file(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        cfg.check_paths()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: CliConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.corpus,
            &mut self.lexicon,
            &mut self.synonyms,
            &mut self.embeddings,
            &mut self.stopwords,
            &mut self.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    fn check_paths(&self) -> Result<()> {
        let inputs = [
            ("corpus", &self.corpus),
            ("lexicon", &self.lexicon),
            ("synonyms", &self.synonyms),
            ("embeddings", &self.embeddings),
            ("stopwords", &self.stopwords),
        ];
        for (key, p) in inputs {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(Error::Config(format!(
                        "{key}: {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.synonyms.is_some() && self.embeddings.is_some() {
            return Err(Error::Config(
                "set only one of synonyms and embeddings".into(),
            ));
        }
        self.measure_kinds()?;
        self.normalization()?;
        self.surrogate().validate()?;
        for m in self.grid()? {
            m.validate()?;
        }
        let attack = self.attack_template()?;
        for tau in self.taus() {
            AttackConfig {
                tau,
                ..attack.clone()
            }
            .validate()?;
        }
        Ok(())
    }

    fn measure_kinds(&self) -> Result<Vec<MeasureKind>> {
        let names = self
            .measure
            .as_ref()
            .map_or_else(|| vec!["all".to_string()], OneOrMany::to_vec);
        let mut kinds = Vec::new();
        for name in names {
            if name == "all" {
                kinds.extend(MeasureKind::ALL);
            } else {
                kinds.push(name.parse()?);
            }
        }
        if kinds.is_empty() {
            return Err(Error::Config("measure list is empty".into()));
        }
        Ok(kinds)
    }

    fn normalization(&self) -> Result<Normalization> {
        self.normalization
            .as_deref()
            .map_or(Ok(Normalization::PaperBound), str::parse)
    }

    pub fn persistences(&self) -> Vec<f64> {
        self.rbo_p
            .as_ref()
            .map_or_else(|| DEFAULT_PERSISTENCES.to_vec(), OneOrMany::to_vec)
    }

    pub fn taus(&self) -> Vec<f64> {
        self.tau
            .as_ref()
            .map_or_else(|| DEFAULT_TAUS.to_vec(), OneOrMany::to_vec)
    }

    /// Measures in file order; `rbo` expands to one entry per persistence.
    pub fn grid(&self) -> Result<Vec<Measure>> {
        let normalization = self.normalization()?;
        let mut grid = Vec::new();
        for kind in self.measure_kinds()? {
            if kind == MeasureKind::Rbo {
                grid.extend(self.persistences().into_iter().map(MeasureSpec::rbo));
                continue;
            }
            let mut spec = MeasureSpec::new(kind).with_normalization(normalization);
            if let Some(phi) = self.penalty {
                spec = spec.with_penalty(phi);
            }
            grid.push(spec);
        }
        Ok(grid)
    }

    pub fn surrogate(&self) -> SurrogateConfig {
        let d = SurrogateConfig::default();
        SurrogateConfig {
            n_samples: self.n_samples.unwrap_or(d.n_samples),
            kernel_width: self.kernel_width.unwrap_or(d.kernel_width),
            ridge_lambda: self.ridge_lambda.unwrap_or(d.ridge_lambda),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    fn attack_template(&self) -> Result<AttackConfig> {
        let d = AttackConfig::default();
        Ok(AttackConfig {
            measure: self.grid()?[0],
            tau: self.taus().first().copied().unwrap_or(d.tau),
            max_perturb_frac: self.max_perturb_frac.unwrap_or(d.max_perturb_frac),
            n_neighbors: self.n_neighbors.unwrap_or(d.n_neighbors),
            min_embedding_sim: self.min_embedding_sim.unwrap_or(d.min_embedding_sim),
            stopwords: HashSet::new(),
            seed: self.seed.unwrap_or(d.seed),
            reexplain_initial: false,
        })
    }

    /// Settings for a single attack: the first measure and first tau.
    pub fn attack(&self) -> Result<AttackConfig> {
        Ok(AttackConfig {
            stopwords: self.load_stopwords()?,
            ..self.attack_template()?
        })
    }

    fn require<'a>(&self, key: &str, p: &'a Option<PathBuf>) -> Result<&'a Path> {
        p.as_deref()
            .ok_or_else(|| Error::Config(format!("missing required key {key}")))
    }

    pub fn load_corpus(&self) -> Result<Vec<LabeledDocument>> {
        let path = self.require("corpus", &self.corpus)?;
        parse_corpus(&read(path)?).map_err(|e| e.in_file(path))
    }

    pub fn load_model(&self) -> Result<LexiconClassifier<f64>> {
        let path = self.require("lexicon", &self.lexicon)?;
        LexiconClassifier::parse(&read(path)?).map_err(|e| e.in_file(path))
    }

    pub fn load_provider(&self) -> Result<Arc<dyn SynonymProvider>> {
        if let Some(path) = &self.synonyms {
            let table = SynonymTable::parse(&read(path)?).map_err(|e| e.in_file(path))?;
            return Ok(Arc::new(table));
        }
        if let Some(path) = &self.embeddings {
            let index = EmbeddingIndex::parse(&read(path)?).map_err(|e| e.in_file(path))?;
            return Ok(Arc::new(index));
        }
        Ok(Arc::new(NoSynonyms))
    }

    /// One stopword per line; an absent key means no stopwords.
    pub fn load_stopwords(&self) -> Result<HashSet<Feature>> {
        let Some(path) = &self.stopwords else {
            return Ok(HashSet::new());
        };
        read(path)?
            .split_whitespace()
            .map(|w| Feature::new(w).map_err(|e| e.in_file(path)))
            .collect()
    }

    pub fn output_dir(&self) -> Result<&Path> {
        self.require("output_dir", &self.output_dir)
    }

    /// Loads every input needed for a grid run.
    pub fn experiment(&self, threads: Option<usize>) -> Result<Experiment> {
        Ok(Experiment {
            corpus: self.load_corpus()?,
            model: self.load_model()?,
            provider: self.load_provider()?,
            surrogate: self.surrogate(),
            attack: self.attack()?,
            grid: self.grid()?,
            taus: self.taus(),
            base_seed: self.seed.unwrap_or(0),
            threads,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            CliConfig::parse("colour = 1\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn defaults_give_nine_measures() {
        let cfg = CliConfig::parse("").unwrap();
        let labels: Vec<String> = cfg.grid().unwrap().iter().map(|m| m.label()).collect();
        assert_eq!(labels.len(), 9);
        assert_eq!(labels[6..], ["rbo_0.5", "rbo_0.7", "rbo_0.9"]);
        assert_eq!(cfg.taus(), DEFAULT_TAUS);
        assert_eq!(cfg.surrogate(), SurrogateConfig::default());
    }

    #[test]
    fn scalars_or_lists() {
        let cfg = CliConfig::parse(
            "measure = \"rbo\"\nrbo_p = 0.7\ntau = [0.3, 0.6]\nn_samples = 100\nseed = 9\n",
        )
        .unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid, vec![MeasureSpec::rbo(0.7)]);
        assert_eq!(cfg.taus(), [0.3, 0.6]);
        assert_eq!(cfg.surrogate().n_samples, 100);
        assert_eq!(cfg.attack().unwrap().seed, 9);
    }

    #[test]
    fn footrule_options_apply() {
        let cfg = CliConfig::parse(
            "measure = [\"spearman\", \"jaccard\"]\npenalty = 3.0\nnormalization = \"bruteforce_bound\"\n",
        )
        .unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid[0].penalty, Some(3.0));
        assert_eq!(grid[0].normalization, Normalization::BruteforceBound);
        assert_eq!(grid[0].label(), "spearman_phi3_bf");
        assert_eq!(grid[1].label(), "jaccard");
    }

    #[test]
    fn bad_values_rejected() {
        for text in [
            "measure = \"tau_b\"",
            "rbo_p = 1.5",
            "tau = 0.0",
            "n_samples = 1",
            "normalization = \"loose\"",
            "max_perturb_frac = 2.0",
            "penalty = -1.0",
            "synonyms = \"a\"\nembeddings = \"b\"",
        ] {
            assert!(CliConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn missing_paths_rejected_at_load() {
        let dir = std::env::temp_dir().join(format!("ranksim-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("c.toml");
        fs::write(&cfg_path, "corpus = \"nope.tsv\"\n").unwrap();
        assert!(matches!(CliConfig::load(&cfg_path), Err(Error::Config(_))));
        fs::write(dir.join("corpus.tsv"), "1\tgood film\n").unwrap();
        fs::write(&cfg_path, "corpus = \"corpus.tsv\"\n").unwrap();
        let cfg = CliConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.load_corpus().unwrap().len(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }
}
