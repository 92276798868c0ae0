//! Sessions kept in memory and mirrored to one append-only JSON-lines file
//! per session. Replaying a file through the diagnostician rebuilds the
//! session's entity counter, diagnosis cache and history.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use prepdiag_core::diagnostics::{Diagnosis, DiagnosisError, Diagnostician, Verdict};
use prepdiag_core::exercise::Bank;
use prepdiag_core::session::Session;
use prepdiag_core::term::parse_literal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Diagnose {
        exercise_id: String,
        text: String,
        #[serde(default)]
        trace: bool,
        diagnosis_id: String,
        verdict: Verdict,
        timestamp: u64,
    },
    Why {
        diagnosis_id: String,
        missing_literal: String,
        #[serde(default)]
        trace: bool,
        child_id: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("session file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("session file {path} line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("replaying {path} line {line}: {source}")]
    Replay { path: PathBuf, line: usize, source: DiagnosisError },
}

pub fn valid_session_id(id: &str) -> bool {
    (1..=64).contains(&id.len()) && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// A session plus the lock that keeps its diagnoses and log lines in the
/// same order.
pub struct Handle {
    pub session: Session,
    writer: Mutex<()>,
}

impl Handle {
    pub fn lock(&self) -> MutexGuard<'_, ()> {
        self.writer.lock().unwrap_or_else(|e| e.into_inner())
    }
}

pub struct SessionStore {
    dir: Option<PathBuf>,
    sessions: Mutex<HashMap<String, Arc<Handle>>>,
}

impl SessionStore {
    /// With `dir` unset, sessions live in memory only.
    pub fn new(dir: Option<PathBuf>) -> SessionStore {
        SessionStore { dir, sessions: Mutex::new(HashMap::new()) }
    }

    fn path(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.jsonl")))
    }

    /// The session `id`, restored from its file if it is not in memory.
    /// With `create` false, a session that exists nowhere is `None`.
    pub fn get(&self, id: &str, create: bool, dx: &Diagnostician, bank: &Bank) -> Result<Option<Arc<Handle>>, StoreError> {
        let mut sessions = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(h) = sessions.get(id) {
            return Ok(Some(h.clone()));
        }
        let handle = Handle { session: Session::new(id), writer: Mutex::new(()) };
        match self.path(id).filter(|p| p.exists()) {
            Some(path) => {
                replay(&path, &handle.session, dx, bank)?;
            }
            None if !create => return Ok(None),
            None => {}
        }
        let handle = Arc::new(handle);
        sessions.insert(id.to_string(), handle.clone());
        Ok(Some(handle))
    }

    pub fn append(&self, id: &str, record: &Record) -> Result<(), StoreError> {
        let Some(path) = self.path(id) else { return Ok(()) };
        let io = |source| StoreError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        let line = serde_json::to_string(record).expect("records serialize");
        writeln!(file, "{line}").map_err(io)
    }
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn read_records(path: &PathBuf) -> Result<Vec<Record>, StoreError> {
    let file = File::open(path).map_err(|source| StoreError::Io { path: path.clone(), source })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| StoreError::Io { path: path.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt { path: path.clone(), line: i + 1, message: e.to_string() })?;
        out.push(record);
    }
    Ok(out)
}

/// Re-run every logged request against a fresh session.
pub fn replay(path: &PathBuf, session: &Session, dx: &Diagnostician, bank: &Bank) -> Result<Vec<Diagnosis>, StoreError> {
    let mut out = Vec::new();
    for (i, record) in read_records(path)?.into_iter().enumerate() {
        let line = i + 1;
        let fail = |source| StoreError::Replay { path: path.clone(), line, source };
        let d = match record {
            Record::Diagnose { exercise_id, text, trace, .. } => {
                let exercise = bank.get(&exercise_id).ok_or_else(|| StoreError::Corrupt {
                    path: path.clone(),
                    line,
                    message: format!("unknown exercise '{exercise_id}'"),
                })?;
                dx.diagnose(session, exercise, &text, trace).map_err(fail)?
            }
            Record::Why { diagnosis_id, missing_literal, trace, .. } => {
                let literal = parse_literal(&missing_literal)
                    .map_err(|e| StoreError::Corrupt { path: path.clone(), line, message: e.to_string() })?;
                dx.why(session, &diagnosis_id, &literal, trace).map_err(fail)?
            }
        };
        out.push(d);
    }
    Ok(out)
}
