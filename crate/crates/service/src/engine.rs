//! Loaded corpora plus the review store; the single translation path behind
//! both the HTTP API and the CLI.

use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context};
use rulebridge::catalog::{clean_and_split, load_ontology, load_recipes, OntologyCatalog, ProprietaryCatalog};
use rulebridge::config::Config;
use rulebridge::embedvec::VectorStore;
use rulebridge::pipeline::{apply_review_overrides, EntailmentBackend, PipelineError, TranslationResult, Translator};
use rulebridge::records::parse_canonical;
use rulebridge::rulestore::RuleStore;
use rulebridge::scoring::{EntailmentScorer, FallbackScorer, ProxyEntailment};
use rulebridge::{Kind, Method};

use crate::client::RemoteEntailment;

pub struct Engine {
    pub config: Config,
    /// Proprietary catalog, when one is configured.
    pub catalog: Option<ProprietaryCatalog>,
    pub ontology: OntologyCatalog,
    pub vectors: VectorStore,
    pub entailment: Box<dyn EntailmentScorer>,
    pub store: RuleStore,
    /// Batch results read from `corpus.results` at startup.
    pub results: Vec<TranslationResult>,
}

pub fn build_entailment(config: &Config) -> anyhow::Result<Box<dyn EntailmentScorer>> {
    let e = &config.entailment;
    let proxy = ProxyEntailment::with_antonyms(e.antonyms.clone());
    Ok(match config.pipeline.entailment_backend {
        EntailmentBackend::Proxy => Box::new(proxy),
        EntailmentBackend::Remote => {
            let Some(endpoint) = &e.endpoint else {
                bail!("entailment backend is remote but entailment.endpoint is not set");
            };
            let remote = RemoteEntailment::new(endpoint, Duration::from_millis(e.timeout_ms), e.retries, e.max_in_flight);
            if e.fallback_to_proxy {
                Box::new(FallbackScorer {
                    primary: remote,
                    secondary: proxy,
                })
            } else {
                Box::new(remote)
            }
        }
    })
}

/// Prepared catalog if configured, else built from the recipe dataset.
pub fn load_catalog(config: &Config) -> anyhow::Result<Option<ProprietaryCatalog>> {
    let corpus = &config.corpus;
    if let Some(path) = &corpus.catalog {
        return Ok(Some(
            ProprietaryCatalog::load(path).with_context(|| format!("loading catalog {}", path.display()))?,
        ));
    }
    match &corpus.recipes {
        Some(path) => {
            let raw = load_recipes(path, &corpus.recipe_format())
                .with_context(|| format!("loading recipes {}", path.display()))?;
            Ok(Some(clean_and_split(&raw)?.0))
        }
        None => Ok(None),
    }
}

pub fn load_ontology_from(config: &Config) -> anyhow::Result<OntologyCatalog> {
    let corpus = &config.corpus;
    let Some(path) = &corpus.ontology else {
        bail!("corpus.ontology is not set");
    };
    load_ontology(path, corpus.ontology_format(), &corpus.ontology_config())
        .with_context(|| format!("loading ontology {}", path.display()))
}

fn load_results(path: &Path) -> anyhow::Result<Vec<TranslationResult>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_canonical(&text).with_context(|| format!("parsing {}", path.display()))
}

impl Engine {
    pub fn load(config: Config) -> anyhow::Result<Self> {
        config.pipeline.validate()?;
        let ontology = load_ontology_from(&config)?;
        let Some(vectors_path) = &config.corpus.vectors else {
            bail!("corpus.vectors is not set");
        };
        let vectors =
            VectorStore::load(vectors_path).with_context(|| format!("loading vectors {}", vectors_path.display()))?;
        let catalog = load_catalog(&config)?;
        let store = match &config.store.path {
            Some(p) => RuleStore::open(p).with_context(|| format!("opening store {}", p.display()))?,
            None => RuleStore::in_memory(),
        };
        let results = match &config.corpus.results {
            Some(p) => load_results(p)?,
            None => Vec::new(),
        };
        let entailment = build_entailment(&config)?;
        Ok(Self {
            config,
            catalog,
            ontology,
            vectors,
            entailment,
            store,
            results,
        })
    }

    pub fn translator(&self) -> Translator<'_, VectorStore, dyn EntailmentScorer> {
        Translator::new(&self.ontology, &self.vectors, &*self.entailment, &self.config.pipeline)
    }

    /// Ranked candidates with active reviews applied, cut to `top_n`
    /// (the configured default when `None`).
    pub fn translate(
        &self,
        name: &str,
        kind: Kind,
        method: Method,
        top_n: Option<usize>,
    ) -> Result<TranslationResult, PipelineError> {
        let result = self.translator().translate(name, kind, method)?;
        Ok(self.present(result, top_n))
    }

    /// Applies reviews and the presentation cut to a computed result.
    pub fn present(&self, result: TranslationResult, top_n: Option<usize>) -> TranslationResult {
        let mut result = apply_review_overrides(result, &self.store);
        result.candidates.truncate(top_n.unwrap_or(self.config.pipeline.top_n));
        result
    }

    /// Stored batch results for `name`/`kind`, reviews applied.
    pub fn stored_results(&self, name: Option<&str>, kind: Option<Kind>) -> Vec<TranslationResult> {
        self.results
            .iter()
            .filter(|r| name.is_none_or(|n| r.source_name == n) && kind.is_none_or(|k| r.kind == k))
            .map(|r| self.present(r.clone(), None))
            .collect()
    }
}
