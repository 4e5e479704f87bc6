//! Corpus preparation: the proprietary recipe dataset and the high-level
//! ontology term lists.

mod ontology;
mod recipes;

use std::path::PathBuf;

pub use ontology::{
    load_ontology, parse_ontology_json, parse_ontology_xml, OntologyCatalog, OntologyConfig,
    OntologyFormat, OntologyTerm,
};
pub use recipes::{
    clean_and_split, load_recipes, parse_recipes, CatalogTerm, CleaningReport, DroppedName,
    ProprietaryCatalog, RawRecipe, RawRecipeSet, RecipeFormat, RecipeFormatConfig,
};

use crate::Kind;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing mandatory column {column:?}")]
    MissingColumn { column: String },
    #[error("malformed record at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("dataset contains no rows")]
    EmptyDataset,
    #[error("every trigger and action name is empty after cleaning")]
    AllNamesEmpty,
    #[error("unparseable ontology: {0}")]
    Ontology(String),
    #[error("ontology yields no {0} terms")]
    EmptyOntology(Kind),
    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),
}
