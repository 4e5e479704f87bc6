//! Word-vector store and mean-vector document embedding.
//!
//! The text format is the usual one for pretrained vectors: one token per
//! line followed by its components, with an optional `count dimension`
//! header line.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum VectorError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("vector file contains no vectors")]
    Empty,
    #[error("line {line}: expected {expected} components, found {found}")]
    WrongLength { line: usize, expected: usize, found: usize },
    #[error("line {line}: {message}")]
    BadValue { line: usize, message: String },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Token vectors keyed by lowercased token. Every vector has exactly
/// `dimension` components.
#[derive(Debug, Clone)]
pub struct VectorStore {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
}

/// Mean of the in-vocabulary token vectors of one text.
#[derive(Debug, Clone, PartialEq)]
pub struct DocVector {
    pub vector: Vec<f64>,
    pub covered_tokens: usize,
    pub total_tokens: usize,
}

impl DocVector {
    pub fn is_degenerate(&self) -> bool {
        self.covered_tokens == 0
    }

    fn norm(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Result of a cosine comparison. `degenerate` is set when either side has
/// zero norm, in which case `value` is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    pub degenerate: bool,
}

/// Lowercases and splits on every non-alphanumeric character. Stopwords are
/// kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

impl VectorStore {
    /// Builds a store from `(token, vector)` pairs. Tokens are lowercased;
    /// the first occurrence of a token wins.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, VectorError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut dimension = None;
        let mut map = HashMap::new();
        for (i, (token, vector)) in entries.into_iter().enumerate() {
            let expected = *dimension.get_or_insert(vector.len());
            if vector.len() != expected || expected == 0 {
                return Err(VectorError::WrongLength {
                    line: i + 1,
                    expected,
                    found: vector.len(),
                });
            }
            map.entry(token.as_ref().to_lowercase()).or_insert(vector);
        }
        match dimension {
            Some(dimension) => Ok(Self { dimension, entries: map }),
            None => Err(VectorError::Empty),
        }
    }

    pub fn load(path: &Path) -> Result<Self, VectorError> {
        let text = std::fs::read_to_string(path).map_err(|source| VectorError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses the text vector format. A first line made of exactly two
    /// unsigned integers is taken as a `count dimension` header.
    pub fn parse(input: &str) -> Result<Self, VectorError> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
        let mut dimension: Option<usize> = None;

        if let Some((_, first)) = lines.peek() {
            let parts: Vec<&str> = first.split_whitespace().collect();
            if let [count, dim] = parts.as_slice() {
                if let (Ok(_), Ok(dim)) = (count.parse::<usize>(), dim.parse::<usize>()) {
                    if dim == 0 {
                        return Err(VectorError::BadValue {
                            line: 1,
                            message: "header declares dimension 0".to_string(),
                        });
                    }
                    dimension = Some(dim);
                    lines.next();
                }
            }
        }

        let mut entries = HashMap::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("blank lines are filtered");
            let vector = parts
                .map(|p| match p.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(VectorError::BadValue {
                        line: line_no,
                        message: format!("invalid component {p:?}"),
                    }),
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let expected = *dimension.get_or_insert(vector.len());
            if vector.len() != expected || expected == 0 {
                return Err(VectorError::WrongLength {
                    line: line_no,
                    expected,
                    found: vector.len(),
                });
            }
            entries.entry(token.to_lowercase()).or_insert(vector);
        }
        if entries.is_empty() {
            return Err(VectorError::Empty);
        }
        Ok(Self {
            dimension: dimension.expect("set by the first vector"),
            entries,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive lookup.
    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(&token.to_lowercase()).map(Vec::as_slice)
    }

    /// Mean vector of the tokens of `text` found in the store. Tokens not in
    /// the store are counted in `total_tokens` but contribute nothing.
    pub fn embed(&self, text: &str) -> DocVector {
        let tokens = tokenize(text);
        let mut sum = vec![0.0; self.dimension];
        let mut covered = 0usize;
        for token in &tokens {
            if let Some(v) = self.entries.get(token) {
                covered += 1;
                for (acc, x) in sum.iter_mut().zip(v) {
                    *acc += x;
                }
            }
        }
        if covered > 0 {
            let n = covered as f64;
            sum.iter_mut().for_each(|x| *x /= n);
        }
        DocVector {
            vector: sum,
            covered_tokens: covered,
            total_tokens: tokens.len(),
        }
    }
}

pub fn cosine(a: &DocVector, b: &DocVector) -> Result<Cosine, VectorError> {
    if a.vector.len() != b.vector.len() {
        return Err(VectorError::DimensionMismatch(a.vector.len(), b.vector.len()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(Cosine {
            value: 0.0,
            degenerate: true,
        });
    }
    let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
    Ok(Cosine {
        value: (dot / (na * nb)).clamp(-1.0, 1.0),
        degenerate: false,
    })
}
