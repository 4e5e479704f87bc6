//! Scorer contracts and the built-in scorers.
//!
//! Document similarity scores live on a 0–1 scale; entailment triples are
//! percentages. The remote entailment client lives in the service crate and
//! plugs in through [`EntailmentScorer`]; the request/response codec for its
//! wire protocol is here so it can be tested and fuzzed without a network.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::embedvec::{cosine, tokenize, VectorStore};

/// Allowed deviation of an entailment triple's sum from 100.
pub const TRIPLE_SUM_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("hypothesis has no tokens")]
    EmptyHypothesis,
    #[error("invalid entailment triple ({entailment}, {contradiction}, {neutral}): {reason}")]
    InvalidTriple {
        entailment: f64,
        contradiction: f64,
        neutral: f64,
        reason: &'static str,
    },
    #[error("malformed scorer response: {0}")]
    Malformed(String),
    #[error("scorer unavailable: {0}")]
    Unavailable(String),
}

/// Cosine similarity clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingScore {
    pub value: f64,
    /// Either text had no in-vocabulary tokens.
    pub degenerate: bool,
}

/// Entailment, contradiction and neutral percentages. A validated triple
/// has non-negative components summing to 100 within
/// [`TRIPLE_SUM_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntailmentTriple {
    pub entailment: f64,
    pub contradiction: f64,
    pub neutral: f64,
}

impl EntailmentTriple {
    pub fn new(entailment: f64, contradiction: f64, neutral: f64) -> Result<Self, ScoreError> {
        Self {
            entailment,
            contradiction,
            neutral,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self, ScoreError> {
        let invalid = |reason| ScoreError::InvalidTriple {
            entailment: self.entailment,
            contradiction: self.contradiction,
            neutral: self.neutral,
            reason,
        };
        let parts = [self.entailment, self.contradiction, self.neutral];
        if parts.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite component"));
        }
        if parts.iter().any(|&x| x < 0.0) {
            return Err(invalid("negative component"));
        }
        if (parts.iter().sum::<f64>() - 100.0).abs() > TRIPLE_SUM_TOLERANCE {
            return Err(invalid("components do not sum to 100"));
        }
        Ok(self)
    }
}

/// Symmetric document similarity between a proprietary name and a
/// candidate ontology name.
pub trait SimilarityScorer: Sync {
    fn similarity(&self, source: &str, candidate: &str) -> EmbeddingScore;

    /// Whether `text` carries any signal for this scorer at all. Sources
    /// without coverage get no embedding candidates.
    fn covers(&self, _text: &str) -> bool {
        true
    }
}

/// Directional entailment scoring with the proprietary name as premise and
/// the ontology term as hypothesis.
pub trait EntailmentScorer: Send + Sync {
    fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError>;

    /// Scores several pairs; results are in input order. Remote backends
    /// override this to make one round trip.
    fn entail_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<Result<EntailmentTriple, ScoreError>>, ScoreError> {
        Ok(pairs.iter().map(|(p, h)| self.entail(p, h)).collect())
    }
}

impl<T: EntailmentScorer + ?Sized> EntailmentScorer for Box<T> {
    fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError> {
        (**self).entail(premise, hypothesis)
    }

    fn entail_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<Result<EntailmentTriple, ScoreError>>, ScoreError> {
        (**self).entail_batch(pairs)
    }
}

impl<T: EntailmentScorer + ?Sized> EntailmentScorer for &T {
    fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError> {
        (**self).entail(premise, hypothesis)
    }

    fn entail_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<Result<EntailmentTriple, ScoreError>>, ScoreError> {
        (**self).entail_batch(pairs)
    }
}

/// `max(0, cosine(embed(source), embed(candidate)))`.
pub fn embedding_score(source: &str, candidate: &str, store: &VectorStore) -> EmbeddingScore {
    let a = store.embed(source);
    let b = store.embed(candidate);
    let c = cosine(&a, &b).expect("vectors from one store share a dimension");
    EmbeddingScore {
        value: c.value.max(0.0),
        degenerate: c.degenerate || a.is_degenerate() || b.is_degenerate(),
    }
}

impl SimilarityScorer for VectorStore {
    fn similarity(&self, source: &str, candidate: &str) -> EmbeddingScore {
        embedding_score(source, candidate, self)
    }

    fn covers(&self, text: &str) -> bool {
        !self.embed(text).is_degenerate()
    }
}

/// Deterministic lexical stand-in for a model-backed entailment scorer.
///
/// Entailment is the share of distinct hypothesis tokens that also occur in
/// the premise. The remainder splits into contradiction and neutral: 60/40
/// when an antonym pair straddles premise and hypothesis, 10/90 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyEntailment {
    pub antonyms: Vec<(String, String)>,
}

pub const DEFAULT_ANTONYMS: [(&str, &str); 6] = [
    ("on", "off"),
    ("above", "below"),
    ("rises", "drops"),
    ("increased", "decreased"),
    ("start", "stop"),
    ("open", "close"),
];

impl Default for ProxyEntailment {
    fn default() -> Self {
        Self {
            antonyms: DEFAULT_ANTONYMS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }
}

impl ProxyEntailment {
    pub fn with_antonyms(antonyms: Vec<(String, String)>) -> Self {
        Self { antonyms }
    }
}

impl EntailmentScorer for ProxyEntailment {
    fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError> {
        let hyp: HashSet<String> = tokenize(hypothesis).into_iter().collect();
        if hyp.is_empty() {
            return Err(ScoreError::EmptyHypothesis);
        }
        let prem: HashSet<String> = tokenize(premise).into_iter().collect();
        let coverage = hyp.intersection(&prem).count() as f64 / hyp.len() as f64;
        let conflict = self.antonyms.iter().any(|(x, y)| {
            (prem.contains(x) && hyp.contains(y)) || (prem.contains(y) && hyp.contains(x))
        });
        let entailment = 100.0 * coverage;
        let remainder = 100.0 - entailment;
        let contradiction = if conflict { 0.6 } else { 0.1 } * remainder;
        Ok(EntailmentTriple {
            entailment,
            contradiction,
            neutral: remainder - contradiction,
        })
    }
}

/// Uses `primary` and falls back to `secondary` whenever the primary
/// reports itself unavailable.
pub struct FallbackScorer<P, S> {
    pub primary: P,
    pub secondary: S,
}

impl<P: EntailmentScorer, S: EntailmentScorer> EntailmentScorer for FallbackScorer<P, S> {
    fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError> {
        match self.primary.entail(premise, hypothesis) {
            Err(ScoreError::Unavailable(_)) => self.secondary.entail(premise, hypothesis),
            other => other,
        }
    }

    fn entail_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<Result<EntailmentTriple, ScoreError>>, ScoreError> {
        match self.primary.entail_batch(pairs) {
            Err(ScoreError::Unavailable(_)) => self.secondary.entail_batch(pairs),
            other => other,
        }
    }
}

/// Wire format of the entailment service: `POST /entail` and
/// `POST /entail/batch`.
pub mod wire {
    use super::{EntailmentTriple, ScoreError};
    use serde::{Deserialize, Serialize};

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    pub struct EntailRequest {
        pub premise: String,
        pub hypothesis: String,
    }

    pub fn request_body(premise: &str, hypothesis: &str) -> Vec<u8> {
        serde_json::to_vec(&EntailRequest {
            premise: premise.to_string(),
            hypothesis: hypothesis.to_string(),
        })
        .expect("request serialisation is infallible")
    }

    /// Batch requests are a JSON array of request objects.
    pub fn batch_request_body(pairs: &[(&str, &str)]) -> Vec<u8> {
        let reqs: Vec<EntailRequest> = pairs
            .iter()
            .map(|(p, h)| EntailRequest {
                premise: p.to_string(),
                hypothesis: h.to_string(),
            })
            .collect();
        serde_json::to_vec(&reqs).expect("request serialisation is infallible")
    }

    /// Decodes and validates a `/entail` response body.
    pub fn parse_response(body: &[u8]) -> Result<EntailmentTriple, ScoreError> {
        let triple: EntailmentTriple =
            serde_json::from_slice(body).map_err(|e| ScoreError::Malformed(e.to_string()))?;
        triple.validate()
    }

    /// Decodes a `/entail/batch` response: a JSON array of triples, one per
    /// request pair. Each triple is validated on its own.
    pub fn parse_batch_response(body: &[u8], expected: usize) -> Result<Vec<Result<EntailmentTriple, ScoreError>>, ScoreError> {
        let triples: Vec<EntailmentTriple> =
            serde_json::from_slice(body).map_err(|e| ScoreError::Malformed(e.to_string()))?;
        if triples.len() != expected {
            return Err(ScoreError::Malformed(format!(
                "expected {expected} results, got {}",
                triples.len()
            )));
        }
        Ok(triples.into_iter().map(EntailmentTriple::validate).collect())
    }
}
