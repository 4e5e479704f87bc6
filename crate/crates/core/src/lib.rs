//! Translation of proprietary trigger-action rule vocabulary into high-level
//! ontology terms.
//!
//! The crate is organised around the translation flow:
//!
//! * [`catalog`] loads the recipe dataset and the ontology and cleans both
//!   into term lists.
//! * [`embedvec`] holds word vectors and computes mean-vector document
//!   similarity.
//! * [`scoring`] defines the scorer contracts (document similarity and
//!   textual entailment) and the built-in scorers.
//! * [`pipeline`] runs the ranked translation for the embedding, entailment
//!   and combined methods and applies human review overrides.
//! * [`records`] renders results in the legacy record shapes.
//! * [`evaluation`] scores methods against gold annotations.
//! * [`rulestore`] persists translated rules and reviews and syncs them with
//!   a remote container.

pub mod catalog;
pub mod config;
pub mod embedvec;
pub mod evaluation;
pub mod pipeline;
pub mod records;
pub mod rulestore;
pub mod scoring;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use text::{clean_name, split_camel_case};

/// Which half of a rule a term belongs to. Triggers are only ever matched
/// against triggers, actions against actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Trigger,
    Action,
}

impl Kind {
    pub const ALL: [Kind; 2] = [Kind::Trigger, Kind::Action];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Trigger => "trigger",
            Kind::Action => "action",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid kind {0:?}, expected \"trigger\" or \"action\"")]
pub struct ParseKindError(pub String);

impl FromStr for Kind {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trigger" | "triggers" => Ok(Kind::Trigger),
            "action" | "actions" => Ok(Kind::Action),
            _ => Err(ParseKindError(s.to_string())),
        }
    }
}

/// Translation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Mean word-vector cosine similarity, threshold filtered.
    Embedding,
    /// Textual entailment with the source as premise.
    Entailment,
    /// Entailment re-scoring of the thresholded embedding pool, ranked by
    /// the mean of both percentages.
    Combined,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Embedding, Method::Entailment, Method::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Embedding => "embedding",
            Method::Entailment => "entailment",
            Method::Combined => "combined",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid method {0:?}, expected \"embedding\", \"entailment\" or \"combined\"")]
pub struct ParseMethodError(pub String);

impl FromStr for Method {
    type Err = ParseMethodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "embedding" | "spacy" => Ok(Method::Embedding),
            "entailment" | "allennlp" => Ok(Method::Entailment),
            "combined" => Ok(Method::Combined),
            _ => Err(ParseMethodError(s.to_string())),
        }
    }
}
