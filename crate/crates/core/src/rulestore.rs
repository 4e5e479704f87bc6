//! Persistence for translated rules and human review decisions.
//!
//! The local backend is a single append-only JSON-lines log replayed into an
//! in-memory index on open; later entries supersede earlier ones and
//! [`RuleStore::compact`] rewrites the log down to the live state. A
//! [`RemoteContainer`] is any document container keyed by rule id that
//! reports an id→revision manifest; [`sync_remote`] reconciles the two
//! sides last-writer-wins.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::pipeline::{ReviewLookup, ScoredCandidate};
use crate::{Kind, Method};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt store log at line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("revision conflict on {id}: stored revision is {stored}, update was based on {supplied}")]
    Conflict { id: String, stored: u64, supplied: u64 },
    #[error("unknown rule id {0}")]
    UnknownId(String),
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// Ontology translation of one side of a rule, with the scores it was
/// chosen on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleScores {
    pub trigger: Option<ScoredCandidate>,
    pub action: Option<ScoredCandidate>,
}

/// A proprietary rule together with its high-level translation.
///
/// `revision` counts stored updates: 0 for a document that has never been
/// stored, and each successful [`RuleStore::put_rule`] increments it by
/// exactly one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslatedRuleDoc {
    pub id: String,
    pub source_platform: String,
    pub original_trigger: String,
    pub original_action: String,
    pub translated_trigger: Option<String>,
    pub translated_action: Option<String>,
    pub method: Method,
    #[serde(default)]
    pub scores: RuleScores,
    pub created_at: DateTime<Utc>,
    /// Time of the last stored update; breaks revision ties during sync.
    pub updated_at: DateTime<Utc>,
    pub revision: u64,
}

impl TranslatedRuleDoc {
    pub fn new(source_platform: &str, original_trigger: &str, original_action: &str, method: Method) -> Self {
        let now = Utc::now();
        Self {
            id: uuid::Uuid::new_v4().to_string(),
            source_platform: source_platform.to_string(),
            original_trigger: original_trigger.to_string(),
            original_action: original_action.to_string(),
            translated_trigger: None,
            translated_action: None,
            method,
            scores: RuleScores::default(),
            created_at: now,
            updated_at: now,
            revision: 0,
        }
    }

    fn check(&self) -> Result<(), StoreError> {
        if self.id.trim().is_empty() {
            return Err(StoreError::Invalid("empty id".into()));
        }
        if self.id.contains('/') || self.id.chars().any(char::is_control) {
            return Err(StoreError::Invalid(format!("id {:?} is not path-safe", self.id)));
        }
        Ok(())
    }
}

/// Accuracy scale a reviewer attaches to a chosen translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accuracy {
    NotAtAll,
    Low,
    Accurate,
    VeryAccurate,
}

impl Accuracy {
    pub fn label(self) -> &'static str {
        match self {
            Accuracy::NotAtAll => "Not at all accurate",
            Accuracy::Low => "Low accuracy",
            Accuracy::Accurate => "Accurate",
            Accuracy::VeryAccurate => "Very accurate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ReviewVerdict {
    Chosen { candidate: String },
    NoneSuitable,
}

/// A human decision about the translation of one proprietary term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub source_name: String,
    pub kind: Kind,
    #[serde(flatten)]
    pub verdict: ReviewVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<Accuracy>,
    /// Method whose list the selection came from, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    pub reviewer: String,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleFilter {
    pub source_platform: Option<String>,
    pub method: Option<Method>,
}

impl RuleFilter {
    fn matches(&self, doc: &TranslatedRuleDoc) -> bool {
        self.source_platform.as_ref().is_none_or(|p| &doc.source_platform == p)
            && self.method.is_none_or(|m| doc.method == m)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
enum LogEntry {
    Rule { doc: Box<TranslatedRuleDoc> },
    Review { review: ReviewRecord },
}

/// Live state of a store.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StoreState {
    pub rules: BTreeMap<String, TranslatedRuleDoc>,
    pub reviews: HashMap<(String, Kind), ReviewRecord>,
}

impl StoreState {
    fn apply(&mut self, entry: LogEntry) {
        match entry {
            LogEntry::Rule { doc } => {
                self.rules.insert(doc.id.clone(), *doc);
            }
            LogEntry::Review { review } => {
                self.reviews.insert((review.source_name.clone(), review.kind), review);
            }
        }
    }
}

/// Result of replaying a log.
#[derive(Debug)]
pub struct Replay {
    pub state: StoreState,
    /// Byte length of the log up to and including the last complete entry.
    pub valid_len: usize,
    /// A final entry without its newline that failed to parse was skipped.
    pub torn_tail: bool,
}

/// Replays a store log. An unterminated, unparseable last line is treated as
/// a torn write and skipped; any other bad line is corruption.
pub fn replay_log(bytes: &[u8]) -> Result<Replay, StoreError> {
    let mut state = StoreState::default();
    let mut offset = 0usize;
    let mut line_no = 0usize;
    while offset < bytes.len() {
        line_no += 1;
        let rest = &bytes[offset..];
        let (line, next, terminated) = match rest.iter().position(|&b| b == b'\n') {
            Some(i) => (&rest[..i], offset + i + 1, true),
            None => (rest, bytes.len(), false),
        };
        if line.iter().all(u8::is_ascii_whitespace) {
            offset = next;
            continue;
        }
        match serde_json::from_slice::<LogEntry>(line) {
            Ok(entry) => state.apply(entry),
            Err(_) if !terminated => {
                return Ok(Replay {
                    state,
                    valid_len: offset,
                    torn_tail: true,
                })
            }
            Err(e) => {
                return Err(StoreError::Corrupt {
                    line: line_no,
                    message: e.to_string(),
                })
            }
        }
        offset = next;
    }
    Ok(Replay {
        state,
        valid_len: bytes.len(),
        torn_tail: false,
    })
}

struct LogFile {
    path: PathBuf,
    file: File,
}

/// Rule and review store. Writes are serialised; readers only ever see
/// committed state.
pub struct RuleStore {
    state: RwLock<StoreState>,
    log: Option<Mutex<LogFile>>,
}

impl RuleStore {
    /// A store that lives only in memory.
    pub fn in_memory() -> Self {
        Self {
            state: RwLock::new(StoreState::default()),
            log: None,
        }
    }

    /// Opens (or creates) the log at `path` and replays it.
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let io = |source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(io)?;
        let bytes = std::fs::read(path).map_err(io)?;
        let replay = replay_log(&bytes)?;
        if replay.torn_tail {
            file.set_len(replay.valid_len as u64).map_err(io)?;
        }
        if replay.valid_len > 0 && bytes[replay.valid_len - 1] != b'\n' {
            file.write_all(b"\n").map_err(io)?;
        }
        file.seek(SeekFrom::End(0)).map_err(io)?;
        Ok(Self {
            state: RwLock::new(replay.state),
            log: Some(Mutex::new(LogFile {
                path: path.to_path_buf(),
                file,
            })),
        })
    }

    fn append(&self, entry: &LogEntry) -> Result<(), StoreError> {
        let Some(log) = &self.log else { return Ok(()) };
        let mut log = log.lock().expect("store log lock poisoned");
        let mut line = serde_json::to_vec(entry).expect("log entries always serialise");
        line.push(b'\n');
        let path = log.path.clone();
        let io = |source| StoreError::Io { path: path.clone(), source };
        log.file.write_all(&line).map_err(io)?;
        log.file.sync_data().map_err(io)
    }

    /// Stores `doc` as the next revision. `doc.revision` must equal the
    /// stored revision (0 for a new id); the stored revision is returned.
    pub fn put_rule(&self, doc: &TranslatedRuleDoc) -> Result<u64, StoreError> {
        doc.check()?;
        let mut state = self.state.write().expect("store lock poisoned");
        let stored = state.rules.get(&doc.id).map_or(0, |d| d.revision);
        if doc.revision != stored {
            return Err(StoreError::Conflict {
                id: doc.id.clone(),
                stored,
                supplied: doc.revision,
            });
        }
        let mut next = doc.clone();
        next.revision = stored + 1;
        if stored > 0 {
            next.updated_at = Utc::now().max(doc.updated_at);
        }
        let entry = LogEntry::Rule { doc: Box::new(next) };
        self.append(&entry)?;
        let LogEntry::Rule { doc: next } = entry else { unreachable!() };
        let revision = next.revision;
        state.rules.insert(next.id.clone(), *next);
        Ok(revision)
    }

    /// Stores `doc` verbatim, keeping its revision. Used when pulling newer
    /// documents from a remote container.
    pub fn import_rule(&self, doc: &TranslatedRuleDoc) -> Result<(), StoreError> {
        doc.check()?;
        let mut state = self.state.write().expect("store lock poisoned");
        let entry = LogEntry::Rule { doc: Box::new(doc.clone()) };
        self.append(&entry)?;
        state.rules.insert(doc.id.clone(), doc.clone());
        Ok(())
    }

    pub fn get_rule(&self, id: &str) -> Result<TranslatedRuleDoc, StoreError> {
        self.state
            .read()
            .expect("store lock poisoned")
            .rules
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownId(id.to_string()))
    }

    /// Documents matching `filter`, ordered by id.
    pub fn list_rules(&self, filter: &RuleFilter) -> Vec<TranslatedRuleDoc> {
        self.state
            .read()
            .expect("store lock poisoned")
            .rules
            .values()
            .filter(|d| filter.matches(d))
            .cloned()
            .collect()
    }

    /// Records `review`, superseding any earlier review of the same term.
    pub fn record_review(&self, review: &ReviewRecord) -> Result<(), StoreError> {
        if review.source_name.is_empty() {
            return Err(StoreError::Invalid("review without source name".into()));
        }
        let mut state = self.state.write().expect("store lock poisoned");
        let entry = LogEntry::Review { review: review.clone() };
        self.append(&entry)?;
        state.apply(entry);
        Ok(())
    }

    pub fn lookup_review(&self, source_name: &str, kind: Kind) -> Option<ReviewRecord> {
        self.state
            .read()
            .expect("store lock poisoned")
            .reviews
            .get(&(source_name.to_string(), kind))
            .cloned()
    }

    /// Active reviews ordered by kind, then source name.
    pub fn list_reviews(&self) -> Vec<ReviewRecord> {
        let state = self.state.read().expect("store lock poisoned");
        let mut reviews: Vec<_> = state.reviews.values().cloned().collect();
        reviews.sort_by(|a, b| (a.kind, &a.source_name).cmp(&(b.kind, &b.source_name)));
        reviews
    }

    pub fn snapshot(&self) -> StoreState {
        self.state.read().expect("store lock poisoned").clone()
    }

    /// Rewrites the log so it holds exactly one entry per live rule and
    /// review.
    pub fn compact(&self) -> Result<(), StoreError> {
        let Some(log) = &self.log else { return Ok(()) };
        let state = self.state.write().expect("store lock poisoned");
        let mut log = log.lock().expect("store log lock poisoned");
        let path = log.path.clone();
        let io = |source| StoreError::Io { path: path.clone(), source };
        let tmp = path.with_extension("compact.tmp");
        {
            let mut out = File::create(&tmp).map_err(io)?;
            for doc in state.rules.values() {
                let mut line = serde_json::to_vec(&LogEntry::Rule { doc: Box::new(doc.clone()) }).expect("serialisable");
                line.push(b'\n');
                out.write_all(&line).map_err(io)?;
            }
            for review in sorted_reviews(&state) {
                let mut line = serde_json::to_vec(&LogEntry::Review { review }).expect("serialisable");
                line.push(b'\n');
                out.write_all(&line).map_err(io)?;
            }
            out.sync_all().map_err(io)?;
        }
        std::fs::rename(&tmp, &path).map_err(io)?;
        log.file = OpenOptions::new().append(true).open(&path).map_err(io)?;
        Ok(())
    }
}

fn sorted_reviews(state: &StoreState) -> Vec<ReviewRecord> {
    let mut reviews: Vec<_> = state.reviews.values().cloned().collect();
    reviews.sort_by(|a, b| (a.kind, &a.source_name).cmp(&(b.kind, &b.source_name)));
    reviews
}

impl ReviewLookup for RuleStore {
    fn review_for(&self, source_name: &str, kind: Kind) -> Option<ReviewRecord> {
        self.lookup_review(source_name, kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RemoteError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("remote rejected credentials")]
    Unauthorized,
    #[error("remote has no document {0}")]
    NotFound(String),
    #[error("malformed remote payload: {0}")]
    Malformed(String),
}

/// A remote document container.
pub trait RemoteContainer {
    /// Every stored id with its revision.
    fn manifest(&self) -> Result<BTreeMap<String, u64>, RemoteError>;
    fn fetch(&self, id: &str) -> Result<TranslatedRuleDoc, RemoteError>;
    fn store(&self, doc: &TranslatedRuleDoc) -> Result<(), RemoteError>;
}

/// In-process container, handy for tests and dry runs.
#[derive(Debug, Default)]
pub struct MemoryContainer {
    docs: Mutex<BTreeMap<String, TranslatedRuleDoc>>,
}

impl MemoryContainer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn docs(&self) -> BTreeMap<String, TranslatedRuleDoc> {
        self.docs.lock().expect("container lock poisoned").clone()
    }
}

impl RemoteContainer for MemoryContainer {
    fn manifest(&self) -> Result<BTreeMap<String, u64>, RemoteError> {
        Ok(self.docs().into_iter().map(|(id, d)| (id, d.revision)).collect())
    }

    fn fetch(&self, id: &str) -> Result<TranslatedRuleDoc, RemoteError> {
        self.docs().get(id).cloned().ok_or_else(|| RemoteError::NotFound(id.to_string()))
    }

    fn store(&self, doc: &TranslatedRuleDoc) -> Result<(), RemoteError> {
        self.docs
            .lock()
            .expect("container lock poisoned")
            .insert(doc.id.clone(), doc.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncReport {
    pub pushed: Vec<String>,
    pub pulled: Vec<String>,
    /// Same revision and update time but different content; left alone.
    pub conflicted: Vec<String>,
    /// Ids whose transfer failed, with the reason.
    pub failed: Vec<(String, String)>,
}

impl SyncReport {
    pub fn is_noop(&self) -> bool {
        self.pushed.is_empty() && self.pulled.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SyncError {
    #[error("cannot list remote container: {0}")]
    Remote(#[from] RemoteError),
}

enum Direction {
    Push,
    Pull,
    Conflict,
    Skip,
}

/// Reconciles `store` with `remote`, last-writer-wins by revision with ties
/// broken by update time. Works on a snapshot of the local store; failures
/// on single documents are reported without aborting the run.
pub fn sync_remote(store: &RuleStore, remote: &dyn RemoteContainer) -> Result<SyncReport, SyncError> {
    let manifest = remote.manifest()?;
    let local = store.snapshot().rules;
    let mut report = SyncReport::default();

    let mut ids: Vec<&String> = local.keys().chain(manifest.keys()).collect();
    ids.sort();
    ids.dedup();

    for id in ids {
        let ours = local.get(id);
        let direction = match (ours, manifest.get(id)) {
            (Some(_), None) => Direction::Push,
            (None, Some(_)) => Direction::Pull,
            (Some(doc), Some(&theirs)) if doc.revision > theirs => Direction::Push,
            (Some(doc), Some(&theirs)) if doc.revision < theirs => Direction::Pull,
            (Some(doc), Some(_)) => match remote.fetch(id) {
                Ok(remote_doc) if &remote_doc == doc => Direction::Skip,
                Ok(remote_doc) => match doc.updated_at.cmp(&remote_doc.updated_at) {
                    std::cmp::Ordering::Greater => Direction::Push,
                    std::cmp::Ordering::Less => Direction::Pull,
                    std::cmp::Ordering::Equal => Direction::Conflict,
                },
                Err(e) => {
                    report.failed.push((id.clone(), e.to_string()));
                    Direction::Skip
                }
            },
            (None, None) => Direction::Skip,
        };
        match direction {
            Direction::Push => match remote.store(ours.expect("push implies a local doc")) {
                Ok(()) => report.pushed.push(id.clone()),
                Err(e) => report.failed.push((id.clone(), e.to_string())),
            },
            Direction::Pull => {
                let pulled = remote
                    .fetch(id)
                    .map_err(|e| e.to_string())
                    .and_then(|doc| store.import_rule(&doc).map_err(|e| e.to_string()));
                match pulled {
                    Ok(()) => report.pulled.push(id.clone()),
                    Err(e) => report.failed.push((id.clone(), e)),
                }
            }
            Direction::Conflict => report.conflicted.push(id.clone()),
            Direction::Skip => {}
        }
    }
    Ok(report)
}
