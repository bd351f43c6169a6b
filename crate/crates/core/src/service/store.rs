//! File-per-record JSON store: `exercises/<id>.json`, `submissions/<id>.json`,
//! `sessions/<id>.log` and an `index.json` listing every record.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::verdict::Verdict;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExerciseRecord {
    pub id: String,
    pub title: String,
    pub description: String,
    /// Method header, e.g. `method getMax(a: int[]) -> int;`.
    pub signature: String,
    pub model_spec: String,
    /// Unix time in milliseconds.
    pub created_at: u64,
    #[serde(default)]
    pub check_overrides: CheckOverrides,
    /// Model compared with itself at creation time.
    pub self_check: Verdict,
}

/// Student specification as submitted: DSL text or an AST document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StudentSpec {
    Text(String),
    Ast(Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmissionRecord {
    pub id: String,
    pub exercise_id: String,
    pub student_spec: StudentSpec,
    pub verdict: Verdict,
    pub timestamp: u64,
    pub session_seed: u64,
    pub session_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Index {
    exercises: Vec<String>,
    submissions: Vec<String>,
    next_id: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("record `{0}` already exists")]
    Duplicate(String),
    #[error("record id `{0}` may only contain letters, digits, `-` and `_`")]
    BadId(String),
}

struct Inner {
    index: Index,
    exercises: BTreeMap<String, ExerciseRecord>,
    submissions: BTreeMap<String, SubmissionRecord>,
}

pub struct Store {
    dir: PathBuf,
    inner: Mutex<Inner>,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| StoreError::Json { path: path.to_path_buf(), source })
}

/// Writes through a temporary file so a crash never leaves a torn record.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), StoreError> {
    let bytes = serde_json::to_vec_pretty(value).map_err(|source| StoreError::Json { path: path.to_path_buf(), source })?;
    write_atomic(path, &bytes)
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Store {
    /// Opens (creating if needed) the store at `dir` and loads every indexed record.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let dir = dir.into();
        for sub in ["exercises", "submissions", "sessions"] {
            let p = dir.join(sub);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        let index_path = dir.join("index.json");
        let index: Index = if index_path.exists() { read_json(&index_path)? } else { Index::default() };
        let mut exercises = BTreeMap::new();
        for id in &index.exercises {
            exercises.insert(id.clone(), read_json(&dir.join("exercises").join(format!("{id}.json")))?);
        }
        let mut submissions = BTreeMap::new();
        for id in &index.submissions {
            submissions.insert(id.clone(), read_json(&dir.join("submissions").join(format!("{id}.json")))?);
        }
        tracing::info!(dir = %dir.display(), exercises = exercises.len(), submissions = submissions.len(), "store opened");
        Ok(Store { dir, inner: Mutex::new(Inner { index, exercises, submissions }) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// A fresh id `<prefix>-<n>`; the counter is persisted with the index.
    pub fn fresh_id(&self, prefix: &str) -> Result<String, StoreError> {
        let mut inner = self.lock();
        inner.index.next_id += 1;
        let id = format!("{prefix}-{}", inner.index.next_id);
        write_json(&self.dir.join("index.json"), &inner.index)?;
        Ok(id)
    }

    pub fn exercise(&self, id: &str) -> Option<ExerciseRecord> {
        self.lock().exercises.get(id).cloned()
    }

    pub fn exercises(&self) -> Vec<ExerciseRecord> {
        self.lock().exercises.values().cloned().collect()
    }

    pub fn has_exercise(&self, id: &str) -> bool {
        self.lock().exercises.contains_key(id)
    }

    pub fn insert_exercise(&self, rec: ExerciseRecord) -> Result<(), StoreError> {
        if !valid_id(&rec.id) {
            return Err(StoreError::BadId(rec.id));
        }
        let mut inner = self.lock();
        if inner.exercises.contains_key(&rec.id) {
            return Err(StoreError::Duplicate(rec.id));
        }
        write_json(&self.dir.join("exercises").join(format!("{}.json", rec.id)), &rec)?;
        inner.index.exercises.push(rec.id.clone());
        write_json(&self.dir.join("index.json"), &inner.index)?;
        inner.exercises.insert(rec.id.clone(), rec);
        Ok(())
    }

    pub fn submission(&self, id: &str) -> Option<SubmissionRecord> {
        self.lock().submissions.get(id).cloned()
    }

    pub fn submissions(&self) -> Vec<SubmissionRecord> {
        self.lock().submissions.values().cloned().collect()
    }

    pub fn insert_submission(&self, rec: SubmissionRecord) -> Result<(), StoreError> {
        let mut inner = self.lock();
        if inner.submissions.contains_key(&rec.id) {
            return Err(StoreError::Duplicate(rec.id));
        }
        write_json(&self.dir.join("submissions").join(format!("{}.json", rec.id)), &rec)?;
        inner.index.submissions.push(rec.id.clone());
        write_json(&self.dir.join("index.json"), &inner.index)?;
        inner.submissions.insert(rec.id.clone(), rec);
        Ok(())
    }

    /// Path of a session's action log.
    pub fn session_log_path(&self, session_id: &str) -> PathBuf {
        self.dir.join("sessions").join(format!("{session_id}.log"))
    }

    pub fn save_session_log(&self, session_id: &str, log: &str) -> Result<(), StoreError> {
        write_atomic(&self.session_log_path(session_id), log.as_bytes())
    }
}
