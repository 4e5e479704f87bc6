//! TOML configuration with `RULEBRIDGE_<SECTION>_<KEY>` environment
//! overrides.
//!
//! ```toml
//! [corpus]
//! recipes = "data/recipes.csv"
//! ontology = "data/eupont.owl"
//! vectors = "data/vectors.txt"
//!
//! [pipeline]
//! threshold = 0.55
//! ```
//!
//! `RULEBRIDGE_PIPELINE_TOP_N=10` replaces `pipeline.top_n`. Override
//! values are read as TOML literals when they parse as one, otherwise as
//! plain strings. Relative paths resolve against the config file's
//! directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{OntologyConfig, OntologyFormat, RecipeFormat, RecipeFormatConfig};
use crate::pipeline::PipelineConfig;
use crate::scoring::DEFAULT_ANTONYMS;

pub const ENV_PREFIX: &str = "RULEBRIDGE_";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("environment variable {var} does not name a known setting")]
    UnknownVariable { var: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub corpus: CorpusConfig,
    pub pipeline: PipelineConfig,
    pub entailment: EntailmentConfig,
    pub store: StoreConfig,
    pub server: ServerConfig,
    pub remote: RemoteConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub recipes: Option<PathBuf>,
    /// `None` picks the format from the file extension.
    pub recipe_format: Option<RecipeFormat>,
    pub delimiter: char,
    pub trigger_column: String,
    pub action_column: String,
    /// A prepared proprietary catalog; used instead of `recipes` when set.
    pub catalog: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub ontology_format: Option<OntologyFormat>,
    pub trigger_root: String,
    pub action_root: String,
    pub split_camel_case: bool,
    pub vectors: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    /// Where batch translation writes canonical results.
    pub results: Option<PathBuf>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        let recipes = RecipeFormatConfig::default();
        let ontology = OntologyConfig::default();
        Self {
            recipes: None,
            recipe_format: recipes.format,
            delimiter: recipes.delimiter,
            trigger_column: recipes.trigger_column,
            action_column: recipes.action_column,
            catalog: None,
            ontology: None,
            ontology_format: None,
            trigger_root: ontology.trigger_root,
            action_root: ontology.action_root,
            split_camel_case: ontology.split_camel_case,
            vectors: None,
            annotations: None,
            results: None,
        }
    }
}

impl CorpusConfig {
    pub fn recipe_format(&self) -> RecipeFormatConfig {
        RecipeFormatConfig {
            format: self.recipe_format,
            delimiter: self.delimiter,
            trigger_column: self.trigger_column.clone(),
            action_column: self.action_column.clone(),
        }
    }

    pub fn ontology_config(&self) -> OntologyConfig {
        OntologyConfig {
            trigger_root: self.trigger_root.clone(),
            action_root: self.action_root.clone(),
            split_camel_case: self.split_camel_case,
        }
    }

    /// Explicit format, else guessed from the ontology path.
    pub fn ontology_format(&self) -> OntologyFormat {
        self.ontology_format
            .or_else(|| self.ontology.as_deref().map(OntologyFormat::from_path))
            .unwrap_or(OntologyFormat::OntologyXml)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntailmentConfig {
    /// Base URL of the entailment model server; `/entail` is appended.
    pub endpoint: Option<String>,
    /// Use the lexical proxy when the remote server is unreachable.
    pub fallback_to_proxy: bool,
    pub max_in_flight: usize,
    pub retries: u32,
    pub timeout_ms: u64,
    pub antonyms: Vec<(String, String)>,
}

impl Default for EntailmentConfig {
    fn default() -> Self {
        Self {
            endpoint: None,
            fallback_to_proxy: false,
            max_in_flight: 8,
            retries: 2,
            timeout_ms: 10_000,
            antonyms: DEFAULT_ANTONYMS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoreConfig {
    /// Append-only log file; `None` keeps the store in memory.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub addr: String,
    /// Bearer token required on write endpoints when set.
    pub token: Option<String>,
    /// Static review UI bundle served under `/ui/`.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            addr: "127.0.0.1:8080".to_string(),
            token: None,
            ui_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteConfig {
    /// Base URL of the rule container.
    pub url: Option<String>,
    pub token: Option<String>,
}

const SECTIONS: [&str; 6] = ["corpus", "pipeline", "entailment", "store", "server", "remote"];

impl Config {
    /// Parses TOML text without applying the environment.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads `path` (if given), applies process environment overrides and
    /// resolves relative paths.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load_with_env(path, std::env::vars())
    }

    pub fn load_with_env<I>(path: Option<&Path>, env: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                text.parse::<toml::Table>().map_err(|e| ConfigError::Parse(e.to_string()))?
            }
            None => toml::Table::new(),
        };
        apply_env(&mut value, env)?;
        let mut config: Config = toml::Value::Table(value)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        if let Some(dir) = path.and_then(Path::parent) {
            config.resolve_paths(dir);
        }
        config.pipeline.validate().map_err(|e| ConfigError::Parse(e.to_string()))?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let c = &mut self.corpus;
        for p in [
            &mut c.recipes,
            &mut c.catalog,
            &mut c.ontology,
            &mut c.vectors,
            &mut c.annotations,
            &mut c.results,
            &mut self.store.path,
            &mut self.server.ui_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

fn apply_env<I>(table: &mut toml::Table, env: I) -> Result<(), ConfigError>
where
    I: IntoIterator<Item = (String, String)>,
{
    for (var, raw) in env {
        let Some(rest) = var.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let rest = rest.to_ascii_lowercase();
        let Some((section, key)) = SECTIONS
            .iter()
            .find_map(|s| rest.strip_prefix(s).and_then(|k| k.strip_prefix('_')).map(|k| (*s, k)))
        else {
            // Other RULEBRIDGE_* variables (e.g. dataset paths for tests)
            // are not settings.
            continue;
        };
        if key.is_empty() {
            return Err(ConfigError::UnknownVariable { var });
        }
        let entry = table
            .entry(section)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(section_table) = entry else {
            return Err(ConfigError::Parse(format!("{section} is not a table")));
        };
        section_table.insert(key.to_string(), parse_literal(&raw));
    }
    Ok(())
}

fn parse_literal(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
