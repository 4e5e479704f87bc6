//! Scoring translation methods against gold annotations.
//!
//! Each non-ambiguous annotated term lands in exactly one bucket per
//! method: the gold match at rank 1 ("first result"), at ranks 2–5 ("top
//! five result"), or not in the first five ("no result"). Methods are
//! compared on top-five coverage first, then first results, then fewest
//! misses.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogTerm, OntologyCatalog, ProprietaryCatalog, RawRecipeSet};
use crate::pipeline::{PipelineError, TranslationResult, Translator};
use crate::scoring::{EntailmentScorer, SimilarityScorer};
use crate::{Kind, Method};

/// Number of ranked candidates a method is judged on.
pub const TOP_CUT: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("annotation line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("annotation references unknown {kind} {name:?}")]
    UnknownSource { name: String, kind: Kind },
    #[error("gold match {candidate:?} for {name:?} is not an ontology {kind}")]
    UnknownCandidate { name: String, kind: Kind, candidate: String },
    #[error("need at least two summaries to compare")]
    TooFewSummaries,
    #[error("summaries cover different annotation totals ({0} vs {1})")]
    MismatchedTotals(usize, usize),
    #[error("sample of {requested} requested but only {available} {kind} terms exist")]
    SampleTooLarge { requested: usize, available: usize, kind: Kind },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum AnnotationLabel {
    BestMatch { candidate: String },
    Ambiguous,
    None,
}

/// Gold label for one proprietary term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub source_name: String,
    pub kind: Kind,
    #[serde(flatten)]
    pub label: AnnotationLabel,
}

/// Parses an annotation file: one JSON record per line; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_annotations(input: &str) -> Result<Vec<AnnotationRecord>, EvalError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_annotations(&text)
}

/// Checks that every gold match names an ontology term of the right kind.
pub fn validate_annotations(annotations: &[AnnotationRecord], ontology: &OntologyCatalog) -> Result<(), EvalError> {
    for a in annotations {
        if let AnnotationLabel::BestMatch { candidate } = &a.label {
            if !ontology.contains(candidate, a.kind) {
                return Err(EvalError::UnknownCandidate {
                    name: a.source_name.clone(),
                    kind: a.kind,
                    candidate: candidate.clone(),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub first_result: usize,
    /// Gold match at ranks 2 through 5.
    pub top_five: usize,
    pub no_result: usize,
    pub ambiguous_excluded: usize,
    /// Of `no_result`, terms labelled "none" for which the method also
    /// returned nothing.
    #[serde(default)]
    pub none_agreed: usize,
}

impl MethodSummary {
    /// Non-ambiguous annotations scored.
    pub fn total(&self) -> usize {
        self.first_result + self.top_five + self.no_result
    }

    /// Gold matches found anywhere in the first five.
    pub fn found(&self) -> usize {
        self.first_result + self.top_five
    }
}

/// Buckets every annotation using the method's first [`TOP_CUT`]
/// candidates.
pub fn score_method(
    method: Method,
    results: &[TranslationResult],
    annotations: &[AnnotationRecord],
) -> Result<MethodSummary, EvalError> {
    score_method_at(method, results, annotations, TOP_CUT)
}

pub fn score_method_at(
    method: Method,
    results: &[TranslationResult],
    annotations: &[AnnotationRecord],
    cut: usize,
) -> Result<MethodSummary, EvalError> {
    let by_key: HashMap<(&str, Kind), &TranslationResult> =
        results.iter().map(|r| ((r.source_name.as_str(), r.kind), r)).collect();
    let mut s = MethodSummary {
        method,
        first_result: 0,
        top_five: 0,
        no_result: 0,
        ambiguous_excluded: 0,
        none_agreed: 0,
    };
    for a in annotations {
        let result = by_key
            .get(&(a.source_name.as_str(), a.kind))
            .ok_or_else(|| EvalError::UnknownSource {
                name: a.source_name.clone(),
                kind: a.kind,
            })?;
        match &a.label {
            AnnotationLabel::Ambiguous => s.ambiguous_excluded += 1,
            AnnotationLabel::None => {
                s.no_result += 1;
                if result.presented(cut).is_empty() {
                    s.none_agreed += 1;
                }
            }
            AnnotationLabel::BestMatch { candidate } => match result.rank_of(candidate, cut) {
                Some(1) => s.first_result += 1,
                Some(_) => s.top_five += 1,
                None => s.no_result += 1,
            },
        }
    }
    Ok(s)
}

/// Orders summaries best first. Input order is kept for full ties.
pub fn compare_methods(summaries: &[MethodSummary]) -> Result<Vec<MethodSummary>, EvalError> {
    if summaries.len() < 2 {
        return Err(EvalError::TooFewSummaries);
    }
    let total = summaries[0].total();
    if let Some(other) = summaries.iter().find(|s| s.total() != total) {
        return Err(EvalError::MismatchedTotals(total, other.total()));
    }
    let mut ranked = summaries.to_vec();
    ranked.sort_by(|a, b| {
        b.found()
            .cmp(&a.found())
            .then(b.first_result.cmp(&a.first_result))
            .then(a.no_result.cmp(&b.no_result))
    });
    Ok(ranked)
}

/// Aligned text table with one row per summary.
pub fn render_summary_table(title: &str, summaries: &[MethodSummary]) -> String {
    let headers = ["Approach", "First Result", "Top Five Result", "No result"];
    let rows: Vec<[String; 4]> = summaries
        .iter()
        .map(|s| {
            [
                s.method.to_string(),
                s.first_result.to_string(),
                s.top_five.to_string(),
                s.no_result.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..4)
        .map(|i| rows.iter().map(|r| r[i].len()).chain([headers[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let line = |cells: [&str; 4]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(headers));
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for r in &rows {
        let _ = writeln!(out, "{}", line([&r[0], &r[1], &r[2], &r[3]]));
    }
    out
}

/// Ranked summaries for one kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindEvaluation {
    pub kind: Kind,
    pub ranking: Vec<MethodSummary>,
}

/// Translates every annotated term with each method and scores the
/// results, per kind. Kinds without annotations are skipped.
pub fn evaluate<S, E>(
    translator: &Translator<'_, S, E>,
    annotations: &[AnnotationRecord],
    methods: &[Method],
) -> Result<Vec<KindEvaluation>, EvalError>
where
    S: SimilarityScorer + ?Sized,
    E: EntailmentScorer + ?Sized,
{
    let mut out = Vec::new();
    for kind in Kind::ALL {
        let gold: Vec<AnnotationRecord> = annotations.iter().filter(|a| a.kind == kind).cloned().collect();
        if gold.is_empty() {
            continue;
        }
        let mut seen = HashSet::new();
        let names: Vec<&str> = gold
            .iter()
            .map(|a| a.source_name.as_str())
            .filter(|n| seen.insert(*n))
            .collect();
        let mut summaries = Vec::new();
        for &method in methods {
            let results = names
                .iter()
                .map(|n| translator.translate(n, kind, method))
                .collect::<Result<Vec<_>, _>>()?;
            summaries.push(score_method(method, &results, &gold)?);
        }
        let ranking = if summaries.len() >= 2 {
            compare_methods(&summaries)?
        } else {
            summaries
        };
        out.push(KindEvaluation { kind, ranking });
    }
    Ok(out)
}

/// Uniform sample of `n` distinct terms of one kind, without replacement.
/// The same seed always yields the same sample in the same order.
pub fn sample_for_annotation(
    catalog: &ProprietaryCatalog,
    kind: Kind,
    n: usize,
    seed: u64,
) -> Result<Vec<CatalogTerm>, EvalError> {
    let terms = catalog.terms(kind);
    if n > terms.len() {
        return Err(EvalError::SampleTooLarge {
            requested: n,
            available: terms.len(),
            kind,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, terms.len(), n)
        .into_iter()
        .map(|i| terms[i].clone())
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindStats {
    /// Distinct names after cleaning.
    pub distinct: usize,
    /// Distinct raw names, before cleaning.
    pub distinct_raw: usize,
    /// Names used by exactly one recipe.
    pub once_only: usize,
    /// Names used by more than one recipe.
    pub duplicates: usize,
    /// Sum of usage counts.
    pub uses: u64,
    /// Rows whose name was empty after cleaning.
    pub dropped: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total_recipes: usize,
    pub triggers: KindStats,
    pub actions: KindStats,
}

pub fn dataset_stats(raw: &RawRecipeSet, catalog: &ProprietaryCatalog) -> DatasetStats {
    let kind_stats = |kind: Kind| {
        let terms = catalog.terms(kind);
        let raw_names: HashSet<&str> = raw
            .rows
            .iter()
            .map(|r| match kind {
                Kind::Trigger => r.trigger.as_str(),
                Kind::Action => r.action.as_str(),
            })
            .collect();
        let uses: u64 = terms.iter().map(|t| t.usage_count).sum();
        KindStats {
            distinct: terms.len(),
            distinct_raw: raw_names.len(),
            once_only: terms.iter().filter(|t| t.usage_count == 1).count(),
            duplicates: terms.iter().filter(|t| t.usage_count > 1).count(),
            uses,
            dropped: raw.rows.len().saturating_sub(uses as usize),
        }
    };
    DatasetStats {
        total_recipes: raw.total_rows(),
        triggers: kind_stats(Kind::Trigger),
        actions: kind_stats(Kind::Action),
    }
}

impl DatasetStats {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "total recipes: {}", self.total_recipes);
        for (label, s) in [("triggers", &self.triggers), ("actions", &self.actions)] {
            let _ = writeln!(
                out,
                "{label}: {} distinct ({} before cleaning), {} once-only, {} duplicates, {} dropped",
                s.distinct, s.distinct_raw, s.once_only, s.duplicates, s.dropped
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{clean_and_split, RawRecipe};
    use crate::pipeline::ScoredCandidate;

    fn result(name: &str, ranked: &[&str]) -> TranslationResult {
        let candidates = ranked
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut sc = ScoredCandidate::new(name, Kind::Trigger, c);
                sc.rank = i + 1;
                sc
            })
            .collect();
        TranslationResult::new(name, Kind::Trigger, Method::Embedding, candidates, vec![])
    }

    fn best(name: &str, candidate: &str) -> AnnotationRecord {
        AnnotationRecord {
            source_name: name.into(),
            kind: Kind::Trigger,
            label: AnnotationLabel::BestMatch { candidate: candidate.into() },
        }
    }

    #[test]
    fn rank_buckets() {
        let results = vec![result("a", &["G", "x"]), result("b", &["x", "y", "G"]), result("c", &["1", "2", "3", "4", "5", "G"])];
        let s = score_method(
            Method::Embedding,
            &results,
            &[best("a", "G"), best("b", "G"), best("c", "G")],
        )
        .unwrap();
        assert_eq!((s.first_result, s.top_five, s.no_result), (1, 1, 1));
    }

    #[test]
    fn none_label_counts_as_no_result() {
        let results = vec![result("a", &[]), result("b", &["x"])];
        let none = |n: &str| AnnotationRecord {
            source_name: n.into(),
            kind: Kind::Trigger,
            label: AnnotationLabel::None,
        };
        let s = score_method(Method::Combined, &results, &[none("a"), none("b")]).unwrap();
        assert_eq!((s.no_result, s.none_agreed), (2, 1));
    }

    #[test]
    fn unknown_source() {
        let err = score_method(Method::Combined, &[], &[best("zz", "G")]).unwrap_err();
        assert!(matches!(err, EvalError::UnknownSource { .. }));
    }

    #[test]
    fn annotation_file_format() {
        let text = "# gold\n{\"source_name\":\"A C turned off\",\"kind\":\"trigger\",\"label\":\"best_match\",\"candidate\":\"Device Turned Off\"}\n\n{\"source_name\":\"Air quality changed\",\"kind\":\"trigger\",\"label\":\"ambiguous\"}\n{\"source_name\":\"Add message\",\"kind\":\"action\",\"label\":\"none\"}\n";
        let parsed = parse_annotations(text).unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0], best("A C turned off", "Device Turned Off"));
        assert_eq!(parsed[2].label, AnnotationLabel::None);
        assert!(matches!(parse_annotations("{\"label\":\"best_match\"}"), Err(EvalError::Malformed { line: 1, .. })));
    }

    #[test]
    fn compare_needs_matching_totals() {
        let s = |m, f, t, n| MethodSummary {
            method: m,
            first_result: f,
            top_five: t,
            no_result: n,
            ambiguous_excluded: 0,
            none_agreed: 0,
        };
        assert!(matches!(compare_methods(&[s(Method::Combined, 1, 1, 1)]), Err(EvalError::TooFewSummaries)));
        assert!(matches!(
            compare_methods(&[s(Method::Combined, 1, 1, 1), s(Method::Embedding, 1, 1, 2)]),
            Err(EvalError::MismatchedTotals(3, 4))
        ));
        let same = compare_methods(&[s(Method::Entailment, 1, 1, 1), s(Method::Combined, 1, 1, 1)]).unwrap();
        assert_eq!(same[0].method, Method::Entailment);
        let table = render_summary_table("Triggers", &same);
        assert!(table.contains("Approach    First Result  Top Five Result  No result"));
        assert!(table.contains("entailment  1             1                1"));
    }

    #[test]
    fn sampling() {
        let raw = RawRecipeSet {
            source_label: "t".into(),
            rows: (0..20).map(|i| RawRecipe { trigger: format!("t{i}"), action: "a".into() }).collect(),
        };
        let (catalog, _) = clean_and_split(&raw).unwrap();
        let a = sample_for_annotation(&catalog, Kind::Trigger, 7, 42).unwrap();
        let b = sample_for_annotation(&catalog, Kind::Trigger, 7, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|t| &t.name).collect::<HashSet<_>>().len(), 7);
        let all = sample_for_annotation(&catalog, Kind::Trigger, 20, 1).unwrap();
        let mut names: Vec<_> = all.iter().map(|t| t.name.clone()).collect();
        names.sort();
        let mut expected: Vec<_> = catalog.triggers.iter().map(|t| t.name.clone()).collect();
        expected.sort();
        assert_eq!(names, expected);
        assert!(matches!(
            sample_for_annotation(&catalog, Kind::Action, 2, 1),
            Err(EvalError::SampleTooLarge { requested: 2, available: 1, .. })
        ));
    }

    #[test]
    fn stats_by_definition() {
        let raw = RawRecipeSet {
            source_label: "t".into(),
            rows: ["a", "a", "b"].iter().map(|t| RawRecipe { trigger: t.to_string(), action: "x".into() }).collect(),
        };
        let (catalog, _) = clean_and_split(&raw).unwrap();
        let s = dataset_stats(&raw, &catalog);
        assert_eq!(s.total_recipes, 3);
        assert_eq!((s.triggers.distinct, s.triggers.once_only, s.triggers.duplicates), (2, 1, 1));
        assert_eq!((s.actions.distinct, s.actions.once_only, s.actions.duplicates), (1, 0, 1));
    }
}
