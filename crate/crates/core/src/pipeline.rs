//! Ranked translation of proprietary names into ontology terms.
//!
//! Every source term is scored against every ontology term of the same
//! kind. The embedding method keeps candidates at or above the similarity
//! threshold; the entailment method keeps everything; the combined method
//! re-scores the thresholded embedding pool with entailment and ranks by
//! `(embedding % + entailment %) / 2`. Ties are broken by ascending
//! candidate name so that output is fully deterministic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{OntologyCatalog, OntologyTerm, ProprietaryCatalog};
use crate::rulestore::{ReviewRecord, ReviewVerdict};
use crate::scoring::{EntailmentScorer, EntailmentTriple, ScoreError, SimilarityScorer};
use crate::{Kind, Method};

pub const DEFAULT_THRESHOLD: f64 = 0.55;
pub const DEFAULT_TOP_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntailmentBackend {
    #[default]
    Proxy,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Minimum embedding similarity (0–1) for a candidate to survive.
    pub threshold: f64,
    /// Candidates shown and evaluated per result.
    pub top_n: usize,
    pub method: Method,
    pub entailment_backend: EntailmentBackend,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            top_n: DEFAULT_TOP_N,
            method: Method::Combined,
            entailment_backend: EntailmentBackend::Proxy,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(PipelineError::InvalidConfig(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        if self.top_n == 0 {
            return Err(PipelineError::InvalidConfig("top_n must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
    #[error("ontology has no {0} terms")]
    EmptyOntology(Kind),
    #[error("entailment scorer unavailable: {0}")]
    ScorerUnavailable(String),
}

/// One ontology term proposed for a proprietary term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub source_name: String,
    pub kind: Kind,
    pub candidate_name: String,
    /// Embedding similarity on its native 0–1 scale.
    pub embedding_similarity: Option<f64>,
    /// `embedding_similarity` on the percent scale.
    pub embedding_pct: Option<f64>,
    pub entailment_triple: Option<EntailmentTriple>,
    /// Mean of `embedding_pct` and the entailment percentage; present
    /// exactly when both are.
    pub combined_pct: Option<f64>,
    pub rank: usize,
    pub pinned_by_review: bool,
}

impl ScoredCandidate {
    pub fn new(source: &str, kind: Kind, candidate: &str) -> Self {
        Self {
            source_name: source.to_string(),
            kind,
            candidate_name: candidate.to_string(),
            embedding_similarity: None,
            embedding_pct: None,
            entailment_triple: None,
            combined_pct: None,
            rank: 0,
            pinned_by_review: false,
        }
    }

    /// The value results of `method` are ordered by.
    pub fn sort_key(&self, method: Method) -> Option<f64> {
        match method {
            Method::Embedding => self.embedding_pct,
            Method::Entailment => self.entailment_triple.map(|t| t.entailment),
            Method::Combined => self.combined_pct,
        }
    }
}

/// The ranked candidates of one proprietary term under one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationResult {
    pub source_name: String,
    pub kind: Kind,
    pub method: Method,
    /// Full ranked list; see [`TranslationResult::presented`].
    pub candidates: Vec<ScoredCandidate>,
    /// True exactly when `candidates` is empty.
    pub no_result: bool,
    /// Candidates set aside because a reviewer found none of them suitable.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub advisory: Vec<ScoredCandidate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl TranslationResult {
    pub fn new(source: &str, kind: Kind, method: Method, candidates: Vec<ScoredCandidate>, diagnostics: Vec<String>) -> Self {
        Self {
            source_name: source.to_string(),
            kind,
            method,
            no_result: candidates.is_empty(),
            candidates,
            advisory: Vec::new(),
            diagnostics,
        }
    }

    /// The first `top_n` candidates.
    pub fn presented(&self, top_n: usize) -> &[ScoredCandidate] {
        &self.candidates[..self.candidates.len().min(top_n)]
    }

    /// 1-based rank of `candidate` within the first `top_n` entries.
    pub fn rank_of(&self, candidate: &str, top_n: usize) -> Option<usize> {
        self.presented(top_n)
            .iter()
            .position(|c| c.candidate_name == candidate)
            .map(|i| i + 1)
    }
}

/// Descending by `key`, ascending by candidate name on ties; ranks are
/// rewritten to 1..n.
fn rank_candidates(candidates: &mut [ScoredCandidate], method: Method) {
    candidates.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(method).unwrap_or(f64::NEG_INFINITY), b.sort_key(method).unwrap_or(f64::NEG_INFINITY));
        kb.total_cmp(&ka).then_with(|| a.candidate_name.cmp(&b.candidate_name))
    });
    for (i, c) in candidates.iter_mut().enumerate() {
        c.rank = i + 1;
    }
}

fn backend_failure(err: ScoreError) -> PipelineError {
    PipelineError::ScorerUnavailable(err.to_string())
}

/// Per-term failures collected by [`Translator::translate_batch`].
#[derive(Debug, Clone, PartialEq)]
pub struct BatchFailure {
    pub source_name: String,
    pub kind: Kind,
    pub error: PipelineError,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchOutcome {
    pub results: Vec<TranslationResult>,
    pub failures: Vec<BatchFailure>,
}

pub struct Translator<'a, S: ?Sized, E: ?Sized> {
    ontology: &'a OntologyCatalog,
    similarity: &'a S,
    entailment: &'a E,
    config: &'a PipelineConfig,
}

impl<'a, S, E> Translator<'a, S, E>
where
    S: SimilarityScorer + ?Sized,
    E: EntailmentScorer + ?Sized,
{
    pub fn new(ontology: &'a OntologyCatalog, similarity: &'a S, entailment: &'a E, config: &'a PipelineConfig) -> Self {
        Self {
            ontology,
            similarity,
            entailment,
            config,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        self.config
    }

    pub fn translate(&self, source: &str, kind: Kind, method: Method) -> Result<TranslationResult, PipelineError> {
        match method {
            Method::Embedding => self.translate_embedding(source, kind),
            Method::Entailment => self.translate_entailment(source, kind),
            Method::Combined => self.translate_combined(source, kind),
        }
    }

    fn terms(&self, kind: Kind) -> Result<&'a [OntologyTerm], PipelineError> {
        let terms = self.ontology.terms(kind);
        if terms.is_empty() {
            Err(PipelineError::EmptyOntology(kind))
        } else {
            Ok(terms)
        }
    }

    /// Threshold-filtered embedding candidates, unranked. A source without
    /// any in-vocabulary token yields no candidates and a diagnostic.
    fn embedding_pool(&self, source: &str, kind: Kind) -> Result<(Vec<ScoredCandidate>, Vec<String>), PipelineError> {
        let terms = self.terms(kind)?;
        if !self.similarity.covers(source) {
            return Ok((Vec::new(), vec![format!("{source:?} has no in-vocabulary tokens")]));
        }
        let pool = terms
            .iter()
            .filter_map(|term| {
                let score = self.similarity.similarity(source, &term.name);
                // Degenerate comparisons carry no signal, whatever the threshold.
                if score.degenerate || score.value < self.config.threshold {
                    return None;
                }
                let mut c = ScoredCandidate::new(source, kind, &term.name);
                c.embedding_similarity = Some(score.value);
                c.embedding_pct = Some(100.0 * score.value);
                Some(c)
            })
            .collect();
        Ok((pool, Vec::new()))
    }

    /// Entailment triples for `candidates` with `source` as premise. Terms
    /// the scorer cannot use as a hypothesis are dropped with a diagnostic.
    fn entail_all(
        &self,
        source: &str,
        candidates: Vec<ScoredCandidate>,
        diagnostics: &mut Vec<String>,
    ) -> Result<Vec<ScoredCandidate>, PipelineError> {
        let pairs: Vec<(&str, &str)> = candidates.iter().map(|c| (source, c.candidate_name.as_str())).collect();
        let triples = self.entailment.entail_batch(&pairs).map_err(backend_failure)?;
        let mut out = Vec::with_capacity(candidates.len());
        for (mut c, triple) in candidates.into_iter().zip(triples) {
            match triple {
                Ok(t) => {
                    c.entailment_triple = Some(t);
                    out.push(c);
                }
                Err(ScoreError::EmptyHypothesis) => {
                    diagnostics.push(format!("{:?} has no tokens to use as a hypothesis", c.candidate_name));
                }
                Err(e) => return Err(backend_failure(e)),
            }
        }
        Ok(out)
    }

    pub fn translate_embedding(&self, source: &str, kind: Kind) -> Result<TranslationResult, PipelineError> {
        let (mut pool, diagnostics) = self.embedding_pool(source, kind)?;
        rank_candidates(&mut pool, Method::Embedding);
        Ok(TranslationResult::new(source, kind, Method::Embedding, pool, diagnostics))
    }

    /// Scores every ontology term; no threshold applies.
    pub fn translate_entailment(&self, source: &str, kind: Kind) -> Result<TranslationResult, PipelineError> {
        let all = self
            .terms(kind)?
            .iter()
            .map(|t| ScoredCandidate::new(source, kind, &t.name))
            .collect();
        let mut diagnostics = Vec::new();
        let mut scored = self.entail_all(source, all, &mut diagnostics)?;
        rank_candidates(&mut scored, Method::Entailment);
        Ok(TranslationResult::new(source, kind, Method::Entailment, scored, diagnostics))
    }

    /// Entailment re-scoring of every thresholded embedding survivor.
    pub fn translate_combined(&self, source: &str, kind: Kind) -> Result<TranslationResult, PipelineError> {
        let (pool, mut diagnostics) = self.embedding_pool(source, kind)?;
        let mut scored = self.entail_all(source, pool, &mut diagnostics)?;
        for c in &mut scored {
            if let (Some(e), Some(t)) = (c.embedding_pct, c.entailment_triple) {
                c.combined_pct = Some((e + t.entailment) / 2.0);
            }
        }
        rank_candidates(&mut scored, Method::Combined);
        Ok(TranslationResult::new(source, kind, Method::Combined, scored, diagnostics))
    }

    /// Translates every trigger and then every action of `catalog`. Terms
    /// are processed in parallel; results keep catalog order and failures
    /// do not abort the batch.
    pub fn translate_batch(&self, catalog: &ProprietaryCatalog, method: Method) -> BatchOutcome {
        let work: Vec<(&str, Kind)> = Kind::ALL
            .iter()
            .flat_map(|&k| catalog.terms(k).iter().map(move |t| (t.name.as_str(), k)))
            .collect();
        let outcomes: Vec<_> = work
            .par_iter()
            .map(|&(name, kind)| (name, kind, self.translate(name, kind, method)))
            .collect();
        let mut batch = BatchOutcome::default();
        for (name, kind, outcome) in outcomes {
            match outcome {
                Ok(r) => batch.results.push(r),
                Err(error) => batch.failures.push(BatchFailure {
                    source_name: name.to_string(),
                    kind,
                    error,
                }),
            }
        }
        batch
    }
}

/// Source of the active human review for a proprietary term.
pub trait ReviewLookup {
    fn review_for(&self, source_name: &str, kind: Kind) -> Option<ReviewRecord>;
}

impl ReviewLookup for std::collections::HashMap<(String, Kind), ReviewRecord> {
    fn review_for(&self, source_name: &str, kind: Kind) -> Option<ReviewRecord> {
        self.get(&(source_name.to_string(), kind)).cloned()
    }
}

/// Applies the active review for the result's term, if any.
pub fn apply_review_overrides(result: TranslationResult, reviews: &dyn ReviewLookup) -> TranslationResult {
    match reviews.review_for(&result.source_name, result.kind) {
        Some(review) => apply_review(result, &review),
        None => result,
    }
}

/// A chosen candidate moves (or is inserted) to rank 1 and is marked
/// pinned; the rest keep their relative order. A "none suitable" verdict
/// empties the list into `advisory` and marks the result as no result.
pub fn apply_review(mut result: TranslationResult, review: &ReviewRecord) -> TranslationResult {
    match &review.verdict {
        ReviewVerdict::Chosen { candidate } => {
            let mut pinned = match result.candidates.iter().position(|c| &c.candidate_name == candidate) {
                Some(i) => result.candidates.remove(i),
                None => ScoredCandidate::new(&result.source_name, result.kind, candidate),
            };
            pinned.pinned_by_review = true;
            result.candidates.insert(0, pinned);
            for (i, c) in result.candidates.iter_mut().enumerate() {
                c.rank = i + 1;
            }
            result.no_result = false;
        }
        ReviewVerdict::NoneSuitable => {
            result.advisory = std::mem::take(&mut result.candidates);
            result.no_result = true;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedvec::VectorStore;
    use crate::scoring::{EmbeddingScore, ProxyEntailment};
    use chrono::Utc;
    use std::collections::HashMap;

    fn ontology(triggers: &[&str]) -> OntologyCatalog {
        let term = |n: &&str, kind| OntologyTerm {
            name: n.to_string(),
            kind,
            raw_id: n.to_string(),
        };
        OntologyCatalog {
            triggers: triggers.iter().map(|n| term(n, Kind::Trigger)).collect(),
            actions: vec![term(&"Send Message", Kind::Action)],
        }
    }

    struct Table(HashMap<&'static str, f64>);
    impl SimilarityScorer for Table {
        fn similarity(&self, _: &str, candidate: &str) -> EmbeddingScore {
            EmbeddingScore {
                value: self.0.get(candidate).copied().unwrap_or(0.0),
                degenerate: false,
            }
        }
    }

    fn store() -> VectorStore {
        VectorStore::parse("device 1 0 0\nturned 0 1 0\noff 0 0 1\non 0.2 0.2 0\nevery 0 0.1 1\ntime 0.1 0 1\n").unwrap()
    }

    #[test]
    fn identical_candidate_ranks_first() {
        let onto = ontology(&["Device Turned Off", "Every Time"]);
        let (vs, proxy, cfg) = (store(), ProxyEntailment::default(), PipelineConfig::default());
        let t = Translator::new(&onto, &vs, &proxy, &cfg);
        let r = t.translate_embedding("device turned off", Kind::Trigger).unwrap();
        assert_eq!(r.candidates[0].candidate_name, "Device Turned Off");
        assert!((r.candidates[0].embedding_pct.unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(r.candidates[0].rank, 1);
        let e = t.translate_entailment("Device Turned Off", Kind::Trigger).unwrap();
        assert_eq!(e.candidates[0].entailment_triple.unwrap().entailment, 100.0);
    }

    #[test]
    fn everything_below_threshold_is_no_result() {
        let onto = ontology(&["A", "B"]);
        let table = Table(HashMap::from([("A", 0.54), ("B", 0.1)]));
        let (proxy, cfg) = (ProxyEntailment::default(), PipelineConfig::default());
        let r = Translator::new(&onto, &table, &proxy, &cfg).translate_embedding("x", Kind::Trigger).unwrap();
        assert!(r.no_result);
        assert!(r.candidates.is_empty());
    }

    #[test]
    fn threshold_is_inclusive() {
        let onto = ontology(&["A"]);
        let table = Table(HashMap::from([("A", 0.55)]));
        let (proxy, cfg) = (ProxyEntailment::default(), PipelineConfig::default());
        let r = Translator::new(&onto, &table, &proxy, &cfg).translate_embedding("x", Kind::Trigger).unwrap();
        assert_eq!(r.candidates.len(), 1);
    }

    #[test]
    fn ties_break_by_name() {
        let onto = ontology(&["Zeta", "Alpha", "Mid"]);
        let table = Table(HashMap::from([("Zeta", 0.8), ("Alpha", 0.8), ("Mid", 0.9)]));
        let (proxy, cfg) = (ProxyEntailment::default(), PipelineConfig::default());
        let t = Translator::new(&onto, &table, &proxy, &cfg);
        let names: Vec<_> = t
            .translate_embedding("x", Kind::Trigger)
            .unwrap()
            .candidates
            .into_iter()
            .map(|c| c.candidate_name)
            .collect();
        assert_eq!(names, ["Mid", "Alpha", "Zeta"]);
        // proxy entailment is 0 for all three: pure name order
        let e: Vec<_> = t
            .translate_entailment("x", Kind::Trigger)
            .unwrap()
            .candidates
            .into_iter()
            .map(|c| c.candidate_name)
            .collect();
        assert_eq!(e, ["Alpha", "Mid", "Zeta"]);
    }

    #[test]
    fn degenerate_source_has_no_result() {
        let onto = ontology(&["Device Turned Off"]);
        let (vs, proxy, cfg) = (store(), ProxyEntailment::default(), PipelineConfig::default());
        let t = Translator::new(&onto, &vs, &proxy, &cfg);
        for method in [Method::Embedding, Method::Combined] {
            let r = t.translate("qqq zzz", Kind::Trigger, method).unwrap();
            assert!(r.no_result);
            assert_eq!(r.diagnostics.len(), 1);
        }
    }

    #[test]
    fn empty_ontology_kind() {
        let onto = OntologyCatalog::default();
        let (vs, proxy, cfg) = (store(), ProxyEntailment::default(), PipelineConfig::default());
        let err = Translator::new(&onto, &vs, &proxy, &cfg).translate("x", Kind::Action, Method::Entailment);
        assert_eq!(err, Err(PipelineError::EmptyOntology(Kind::Action)));
    }

    struct Broken;
    impl EntailmentScorer for Broken {
        fn entail(&self, _: &str, _: &str) -> Result<EntailmentTriple, ScoreError> {
            Err(ScoreError::Unavailable("connection refused".into()))
        }
    }

    #[test]
    fn unavailable_scorer_surfaces() {
        let onto = ontology(&["A"]);
        let (vs, cfg) = (store(), PipelineConfig::default());
        let r = Translator::new(&onto, &vs, &Broken, &cfg).translate("a", Kind::Trigger, Method::Entailment);
        assert!(matches!(r, Err(PipelineError::ScorerUnavailable(_))));
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        assert!(PipelineConfig { threshold: 1.5, ..Default::default() }.validate().is_err());
        assert!(PipelineConfig { top_n: 0, ..Default::default() }.validate().is_err());
    }

    fn result_with(names: &[&str]) -> TranslationResult {
        let candidates = names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let mut c = ScoredCandidate::new("src", Kind::Trigger, n);
                c.embedding_pct = Some(90.0 - i as f64);
                c.rank = i + 1;
                c
            })
            .collect();
        TranslationResult::new("src", Kind::Trigger, Method::Embedding, candidates, vec![])
    }

    fn review(verdict: ReviewVerdict) -> ReviewRecord {
        ReviewRecord {
            source_name: "src".into(),
            kind: Kind::Trigger,
            verdict,
            accuracy: None,
            method: None,
            reviewer: "me".into(),
            created_at: Utc::now(),
        }
    }

    #[test]
    fn pin_existing_candidate() {
        let r = apply_review(result_with(&["a", "b", "c", "d"]), &review(ReviewVerdict::Chosen { candidate: "c".into() }));
        let names: Vec<_> = r.candidates.iter().map(|c| (c.candidate_name.as_str(), c.rank, c.pinned_by_review)).collect();
        assert_eq!(names, [("c", 1, true), ("a", 2, false), ("b", 3, false), ("d", 4, false)]);
        assert_eq!(r.candidates[0].embedding_pct, Some(88.0));
    }

    #[test]
    fn pin_absent_candidate() {
        let r = apply_review(result_with(&["a", "b"]), &review(ReviewVerdict::Chosen { candidate: "new".into() }));
        assert_eq!(r.candidates.len(), 3);
        assert_eq!(r.candidates[0].candidate_name, "new");
        assert!(r.candidates[0].pinned_by_review);
        assert_eq!(r.candidates[0].embedding_pct, None);
        let from_empty = apply_review(result_with(&[]), &review(ReviewVerdict::Chosen { candidate: "x".into() }));
        assert!(!from_empty.no_result);
    }

    #[test]
    fn none_suitable_verdict() {
        let r = apply_review(result_with(&["a", "b"]), &review(ReviewVerdict::NoneSuitable));
        assert!(r.no_result);
        assert!(r.candidates.is_empty());
        assert_eq!(r.advisory.len(), 2);
    }

    #[test]
    fn lookup_by_key() {
        let mut reviews = HashMap::new();
        reviews.insert(("src".to_string(), Kind::Trigger), review(ReviewVerdict::NoneSuitable));
        assert!(apply_review_overrides(result_with(&["a"]), &reviews).no_result);
        let mut other = result_with(&["a"]);
        other.kind = Kind::Action;
        assert!(!apply_review_overrides(other, &reviews).no_result);
    }
}
