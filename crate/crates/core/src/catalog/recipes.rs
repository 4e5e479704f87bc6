use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CatalogError;
use crate::{clean_name, Kind};

/// Layout of a recipe dataset file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecipeFormat {
    /// Delimited text with a header row.
    Delimited,
    /// One JSON object per line.
    JsonLines,
}

impl RecipeFormat {
    /// Guesses the format from a file extension; anything that is not
    /// `.jsonl`/`.ndjson`/`.json` is treated as delimited text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(ext) if ext == "jsonl" || ext == "ndjson" || ext == "json" => RecipeFormat::JsonLines,
            _ => RecipeFormat::Delimited,
        }
    }
}

/// Column mapping for the recipe dataset. Columns other than the trigger
/// and action names are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecipeFormatConfig {
    /// `None` picks the format from the file extension.
    pub format: Option<RecipeFormat>,
    pub delimiter: char,
    pub trigger_column: String,
    pub action_column: String,
}

impl Default for RecipeFormatConfig {
    fn default() -> Self {
        Self {
            format: None,
            delimiter: ',',
            trigger_column: "triggerName".to_string(),
            action_column: "actionName".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecipe {
    pub trigger: String,
    pub action: String,
}

/// Rows of the recipe dataset exactly as read, before cleaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecipeSet {
    pub source_label: String,
    pub rows: Vec<RawRecipe>,
}

impl RawRecipeSet {
    pub fn total_rows(&self) -> usize {
        self.rows.len()
    }
}

/// A cleaned proprietary trigger or action name with the number of recipes
/// that use it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogTerm {
    pub name: String,
    pub kind: Kind,
    pub usage_count: u64,
}

/// Deduplicated trigger and action lists of one platform, in first-seen
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProprietaryCatalog {
    pub source_label: String,
    pub triggers: Vec<CatalogTerm>,
    pub actions: Vec<CatalogTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedName {
    /// Zero-based data row index.
    pub row: usize,
    pub kind: Kind,
    pub raw: String,
}

/// Names that were dropped during cleaning because nothing was left of
/// them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub dropped: Vec<DroppedName>,
}

pub fn load_recipes(path: &Path, cfg: &RecipeFormatConfig) -> Result<RawRecipeSet, CatalogError> {
    let file = File::open(path).map_err(|source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = cfg.format.unwrap_or_else(|| RecipeFormat::from_path(path));
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("recipes")
        .to_string();
    parse_recipes(BufReader::new(file), format, cfg, &label)
}

/// Parses a recipe dataset from any reader. This is the entry point used by
/// [`load_recipes`] and by the fuzz targets.
pub fn parse_recipes<R: Read>(
    reader: R,
    format: RecipeFormat,
    cfg: &RecipeFormatConfig,
    source_label: &str,
) -> Result<RawRecipeSet, CatalogError> {
    let rows = match format {
        RecipeFormat::Delimited => parse_delimited(reader, cfg)?,
        RecipeFormat::JsonLines => parse_json_lines(reader, cfg)?,
    };
    if rows.is_empty() {
        return Err(CatalogError::EmptyDataset);
    }
    Ok(RawRecipeSet {
        source_label: source_label.to_string(),
        rows,
    })
}

fn parse_delimited<R: Read>(reader: R, cfg: &RecipeFormatConfig) -> Result<Vec<RawRecipe>, CatalogError> {
    let delimiter = u8::try_from(cfg.delimiter).map_err(|_| CatalogError::Malformed {
        line: 0,
        message: format!("delimiter {:?} is not a single byte", cfg.delimiter),
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').trim() == name)
            .ok_or_else(|| CatalogError::MissingColumn {
                column: name.to_string(),
            })
    };
    let trigger_idx = column(&cfg.trigger_column)?;
    let action_idx = column(&cfg.action_column)?;

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |idx: usize, name: &str| {
            record.get(idx).map(str::to_string).ok_or_else(|| CatalogError::Malformed {
                line,
                message: format!("row has no {name:?} field"),
            })
        };
        rows.push(RawRecipe {
            trigger: field(trigger_idx, &cfg.trigger_column)?,
            action: field(action_idx, &cfg.action_column)?,
        });
    }
    Ok(rows)
}

fn csv_error(err: csv::Error) -> CatalogError {
    let line = err.position().map_or(0, |p| p.line() as usize);
    CatalogError::Malformed {
        line,
        message: err.to_string(),
    }
}

fn parse_json_lines<R: Read>(reader: R, cfg: &RecipeFormatConfig) -> Result<Vec<RawRecipe>, CatalogError> {
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CatalogError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| CatalogError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| CatalogError::Malformed {
            line: line_no,
            message: "record is not an object".to_string(),
        })?;
        let field = |name: &str| match obj.get(name) {
            None => Err(CatalogError::MissingColumn {
                column: name.to_string(),
            }),
            Some(serde_json::Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(CatalogError::Malformed {
                line: line_no,
                message: format!("field {name:?} is not a string: {other}"),
            }),
        };
        rows.push(RawRecipe {
            trigger: field(&cfg.trigger_column)?,
            action: field(&cfg.action_column)?,
        });
    }
    Ok(rows)
}

/// Cleans every name (see [`clean_name`]), splits triggers from actions and
/// deduplicates each list, counting how many rows used each name.
pub fn clean_and_split(raw: &RawRecipeSet) -> Result<(ProprietaryCatalog, CleaningReport), CatalogError> {
    let mut triggers = TermCounter::new(Kind::Trigger);
    let mut actions = TermCounter::new(Kind::Action);
    let mut report = CleaningReport::default();

    for (row, recipe) in raw.rows.iter().enumerate() {
        for (counter, name) in [(&mut triggers, &recipe.trigger), (&mut actions, &recipe.action)] {
            let cleaned = clean_name(name);
            if cleaned.is_empty() {
                report.dropped.push(DroppedName {
                    row,
                    kind: counter.kind,
                    raw: name.clone(),
                });
            } else {
                counter.add(cleaned);
            }
        }
    }

    if triggers.terms.is_empty() && actions.terms.is_empty() {
        return Err(CatalogError::AllNamesEmpty);
    }
    Ok((
        ProprietaryCatalog {
            source_label: raw.source_label.clone(),
            triggers: triggers.terms,
            actions: actions.terms,
        },
        report,
    ))
}

struct TermCounter {
    kind: Kind,
    index: HashMap<String, usize>,
    terms: Vec<CatalogTerm>,
}

impl TermCounter {
    fn new(kind: Kind) -> Self {
        Self {
            kind,
            index: HashMap::new(),
            terms: Vec::new(),
        }
    }

    fn add(&mut self, name: String) {
        if let Some(&i) = self.index.get(&name) {
            self.terms[i].usage_count += 1;
        } else {
            self.index.insert(name.clone(), self.terms.len());
            self.terms.push(CatalogTerm {
                name,
                kind: self.kind,
                usage_count: 1,
            });
        }
    }
}

impl ProprietaryCatalog {
    pub fn terms(&self, kind: Kind) -> &[CatalogTerm] {
        match kind {
            Kind::Trigger => &self.triggers,
            Kind::Action => &self.actions,
        }
    }

    pub fn find(&self, name: &str, kind: Kind) -> Option<&CatalogTerm> {
        self.terms(kind).iter().find(|t| t.name == name)
    }

    /// Serialises the catalog in its prepared JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serialisation is infallible")
    }

    /// Reads a prepared catalog and checks its invariants.
    pub fn from_json(input: &str) -> Result<Self, CatalogError> {
        let catalog: ProprietaryCatalog =
            serde_json::from_str(input).map_err(|e| CatalogError::InvalidCatalog(e.to_string()))?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        for kind in Kind::ALL {
            let mut seen = std::collections::HashSet::new();
            for term in self.terms(kind) {
                let problem = if term.kind != kind {
                    Some("listed under the wrong kind")
                } else if term.name.is_empty() {
                    Some("empty name")
                } else if term.name.contains('/') {
                    Some("name contains '/'")
                } else if term.usage_count == 0 {
                    Some("zero usage count")
                } else if !seen.insert(term.name.as_str()) {
                    Some("duplicate name")
                } else {
                    None
                };
                if let Some(problem) = problem {
                    return Err(CatalogError::InvalidCatalog(format!("{kind} {:?}: {problem}", term.name)));
                }
            }
        }
        Ok(())
    }
}
