//! Result serialisation.
//!
//! Candidates are rendered with the legacy record field names
//! (`ifttt_name`, `eupont_hypothesis`, `spacy_similarity`,
//! `allen_nlp_entailment`, `allen_nlp_contradiction`, `allen_nlp_neutral`,
//! `combined_similarity`) so downstream tooling built around them keeps
//! working. Three layouts are provided:
//!
//! * a flat array of records for one term ([`render_records`]), or an
//!   array of such arrays for many ([`render_records_batch`]);
//! * the keyed-object layout for embedding results
//!   ([`render_keyed_embedding`]): `[{candidate: {ifttt_name, similarity}}]`;
//! * the canonical JSON-lines form ([`render_canonical`]), one line per
//!   result, which also round-trips back into [`TranslationResult`]s.
//!
//! Floats are written in shortest round-trip form, so output is
//! byte-identical for identical inputs.

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::pipeline::{ScoredCandidate, TranslationResult};
use crate::scoring::EntailmentTriple;
use crate::{Kind, Method};

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("keyed layout needs embedding scores, {0:?} has none")]
    MissingEmbedding(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegacyRecord {
    pub ifttt_name: String,
    pub eupont_hypothesis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacy_similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allen_nlp_entailment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allen_nlp_contradiction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allen_nlp_neutral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combined_similarity: Option<f64>,
}

impl From<&ScoredCandidate> for LegacyRecord {
    fn from(c: &ScoredCandidate) -> Self {
        Self {
            ifttt_name: c.source_name.clone(),
            eupont_hypothesis: c.candidate_name.clone(),
            spacy_similarity: c.embedding_pct,
            allen_nlp_entailment: c.entailment_triple.map(|t| t.entailment),
            allen_nlp_contradiction: c.entailment_triple.map(|t| t.contradiction),
            allen_nlp_neutral: c.entailment_triple.map(|t| t.neutral),
            combined_similarity: c.combined_pct,
        }
    }
}

fn limited(result: &TranslationResult, limit: Option<usize>) -> &[ScoredCandidate] {
    match limit {
        Some(n) => result.presented(n),
        None => &result.candidates,
    }
}

pub fn legacy_records(result: &TranslationResult, limit: Option<usize>) -> Vec<LegacyRecord> {
    limited(result, limit).iter().map(LegacyRecord::from).collect()
}

/// Flat, pretty-printed array of records for one result.
pub fn render_records(result: &TranslationResult, limit: Option<usize>) -> String {
    serde_json::to_string_pretty(&legacy_records(result, limit)).expect("records serialise")
}

/// Pretty-printed array holding one record array per result.
pub fn render_records_batch(results: &[TranslationResult], limit: Option<usize>) -> String {
    let all: Vec<Vec<LegacyRecord>> = results.iter().map(|r| legacy_records(r, limit)).collect();
    serde_json::to_string_pretty(&all).expect("records serialise")
}

#[derive(Serialize)]
struct KeyedInner<'a> {
    ifttt_name: &'a str,
    similarity: f64,
}

struct KeyedEntry<'a> {
    candidate: &'a str,
    inner: KeyedInner<'a>,
}

impl Serialize for KeyedEntry<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry(self.candidate, &self.inner)?;
        map.end()
    }
}

/// Keyed-object layout for embedding scores:
/// `[{"<candidate>": {"ifttt_name": ..., "similarity": <0–1>}}, ...]`.
pub fn render_keyed_embedding(result: &TranslationResult, limit: Option<usize>) -> Result<String, RecordError> {
    let entries = limited(result, limit)
        .iter()
        .map(|c| {
            let similarity = c
                .embedding_similarity
                .ok_or_else(|| RecordError::MissingEmbedding(c.candidate_name.clone()))?;
            Ok(KeyedEntry {
                candidate: &c.candidate_name,
                inner: KeyedInner {
                    ifttt_name: &c.source_name,
                    similarity,
                },
            })
        })
        .collect::<Result<Vec<_>, RecordError>>()?;
    Ok(serde_json::to_string_pretty(&entries).expect("records serialise"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CanonicalCandidate {
    rank: usize,
    #[serde(flatten)]
    record: LegacyRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    similarity: Option<f64>,
    #[serde(default)]
    pinned_by_review: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CanonicalLine {
    ifttt_name: String,
    kind: Kind,
    method: Method,
    no_result: bool,
    candidates: Vec<CanonicalCandidate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    advisory: Vec<CanonicalCandidate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<String>,
}

fn to_canonical(c: &ScoredCandidate) -> CanonicalCandidate {
    CanonicalCandidate {
        rank: c.rank,
        record: LegacyRecord::from(c),
        similarity: c.embedding_similarity,
        pinned_by_review: c.pinned_by_review,
    }
}

fn from_canonical(c: CanonicalCandidate, kind: Kind) -> Result<ScoredCandidate, String> {
    let r = c.record;
    let triple = match (r.allen_nlp_entailment, r.allen_nlp_contradiction, r.allen_nlp_neutral) {
        (Some(e), Some(k), Some(n)) => Some(EntailmentTriple::new(e, k, n).map_err(|e| e.to_string())?),
        (None, None, None) => None,
        _ => return Err("partial entailment triple".into()),
    };
    let expected_combined = r.spacy_similarity.is_some() && triple.is_some();
    if r.combined_similarity.is_some() != expected_combined {
        return Err("combined_similarity must be present exactly when both component scores are".into());
    }
    Ok(ScoredCandidate {
        source_name: r.ifttt_name,
        kind,
        candidate_name: r.eupont_hypothesis,
        embedding_similarity: c.similarity.or(r.spacy_similarity.map(|p| p / 100.0)),
        embedding_pct: r.spacy_similarity,
        entailment_triple: triple,
        combined_pct: r.combined_similarity,
        rank: c.rank,
        pinned_by_review: c.pinned_by_review,
    })
}

/// Canonical JSON-lines rendering, one compact line per result, full
/// candidate lists included.
pub fn render_canonical(results: &[TranslationResult]) -> String {
    let mut out = String::new();
    for r in results {
        let line = CanonicalLine {
            ifttt_name: r.source_name.clone(),
            kind: r.kind,
            method: r.method,
            no_result: r.no_result,
            candidates: r.candidates.iter().map(to_canonical).collect(),
            advisory: r.advisory.iter().map(to_canonical).collect(),
            diagnostics: r.diagnostics.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("records serialise"));
        out.push('\n');
    }
    out
}

/// Reads the canonical form back, checking record invariants.
pub fn parse_canonical(input: &str) -> Result<Vec<TranslationResult>, RecordError> {
    let mut results = Vec::new();
    for (idx, text) in input.lines().enumerate() {
        let line_no = idx + 1;
        if text.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| RecordError::Malformed { line: line_no, message };
        let line: CanonicalLine = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        if line.no_result != line.candidates.is_empty() {
            return Err(malformed("no_result disagrees with the candidate list".into()));
        }
        let kind = line.kind;
        let convert = |cs: Vec<CanonicalCandidate>| -> Result<Vec<ScoredCandidate>, RecordError> {
            cs.into_iter()
                .map(|c| from_canonical(c, kind).map_err(&malformed))
                .collect()
        };
        results.push(TranslationResult {
            source_name: line.ifttt_name,
            kind,
            method: line.method,
            candidates: convert(line.candidates)?,
            no_result: line.no_result,
            advisory: convert(line.advisory)?,
            diagnostics: line.diagnostics,
        });
    }
    Ok(results)
}
