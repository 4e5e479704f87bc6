#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use rulebridge::catalog::{
    clean_and_split, load_ontology, load_recipes, OntologyCatalog, OntologyConfig, OntologyFormat, OntologyTerm,
    ProprietaryCatalog, RawRecipeSet, RecipeFormatConfig,
};
use rulebridge::embedvec::VectorStore;
use rulebridge::scoring::{EmbeddingScore, EntailmentScorer, EntailmentTriple, ScoreError, SimilarityScorer};
use rulebridge::Kind;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).expect("golden file")
}

pub struct Corpus {
    pub raw: RawRecipeSet,
    pub catalog: ProprietaryCatalog,
    pub ontology: OntologyCatalog,
    pub vectors: VectorStore,
}

pub fn corpus() -> Corpus {
    let raw = load_recipes(&fixture("recipes-mini.csv"), &RecipeFormatConfig::default()).unwrap();
    let (catalog, _) = clean_and_split(&raw).unwrap();
    let ontology = load_ontology(
        &fixture("eupont-mini.owl"),
        OntologyFormat::OntologyXml,
        &OntologyConfig::default(),
    )
    .unwrap();
    let vectors = VectorStore::load(&fixture("vectors-mini.txt")).unwrap();
    Corpus {
        raw,
        catalog,
        ontology,
        vectors,
    }
}

pub fn ontology_of(triggers: &[&str], actions: &[&str]) -> OntologyCatalog {
    let terms = |names: &[&str], kind| {
        names
            .iter()
            .map(|n| OntologyTerm {
                name: n.to_string(),
                kind,
                raw_id: n.replace(' ', ""),
            })
            .collect()
    };
    OntologyCatalog {
        triggers: terms(triggers, Kind::Trigger),
        actions: terms(actions, Kind::Action),
    }
}

/// Similarity looked up by candidate name; unknown candidates score 0.
pub struct TableSimilarity(pub HashMap<String, f64>);

impl TableSimilarity {
    pub fn new(rows: &[(&str, f64)]) -> Self {
        Self(rows.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl SimilarityScorer for TableSimilarity {
    fn similarity(&self, _source: &str, candidate: &str) -> EmbeddingScore {
        EmbeddingScore {
            value: self.0.get(candidate).copied().unwrap_or(0.0),
            degenerate: false,
        }
    }
}

/// Entailment triple looked up by hypothesis.
pub struct TableEntailment(pub HashMap<String, EntailmentTriple>);

impl TableEntailment {
    pub fn new(rows: &[(&str, [f64; 3])]) -> Self {
        Self(
            rows.iter()
                .map(|(k, [e, c, n])| {
                    (
                        k.to_string(),
                        EntailmentTriple {
                            entailment: *e,
                            contradiction: *c,
                            neutral: *n,
                        },
                    )
                })
                .collect(),
        )
    }
}

impl EntailmentScorer for TableEntailment {
    fn entail(&self, _premise: &str, hypothesis: &str) -> Result<EntailmentTriple, ScoreError> {
        self.0
            .get(hypothesis)
            .copied()
            .ok_or_else(|| ScoreError::Unavailable(format!("no triple for {hypothesis:?}")))
    }
}

/// Drops whitespace outside JSON strings.
pub fn minify(json: &str) -> String {
    let mut out = String::with_capacity(json.len());
    let (mut in_str, mut escaped) = (false, false);
    for ch in json.chars() {
        if in_str {
            out.push(ch);
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
        } else if ch == '"' {
            in_str = true;
            out.push(ch);
        } else if !ch.is_whitespace() {
            out.push(ch);
        }
    }
    out
}
