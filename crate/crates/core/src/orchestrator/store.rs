use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::feedback::{FeedbackEmbedding, SteeringMode};
use crate::ideation::{DesignDoc, Strategy, WaypointTranscript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Timeout,
    Memory,
    IllegalEviction,
    IllegalPlacement,
    RuntimeError,
    BadModule,
    ParseFailed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializable");
        f.write_str(s.as_str().expect("string variant"))
    }
}

/// How the stimuli of a record were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Unguided,
    Random,
    Warmup,
    Gpr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Steering {
    pub mode: SteeringMode,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    pub calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    /// Exact decimal string.
    pub usd: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Models {
    pub client: String,
    pub ideation: String,
    pub coding: String,
}

/// One iteration's complete artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub id: String,
    pub iteration: u64,
    pub strategy: Strategy,
    pub selection: Selection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stimuli: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steering: Option<Steering>,
    pub transcripts: Vec<WaypointTranscript>,
    pub design: Option<DesignDoc>,
    pub code: Option<String>,
    pub status: Status,
    pub embedding: Option<FeedbackEmbedding>,
    pub cost: Cost,
    pub models: Models,
    pub created_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn solution_id(iteration: u64) -> String {
    format!("sol-{iteration:04}")
}

impl SolutionRecord {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// Invariant violations of this record alone.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.is_ok() != self.embedding.is_some() {
            v.push(format!("{}: status {} but embedding {}", self.id, self.status, if self.embedding.is_some() { "present" } else { "absent" }));
        }
        if (self.strategy == Strategy::Repeated) != self.stimuli.is_none() {
            v.push(format!("{}: strategy {} inconsistent with stimuli", self.id, self.strategy));
        }
        if self.is_ok() && (self.design.is_none() || self.code.is_none()) {
            v.push(format!("{}: ok without design and code", self.id));
        }
        if self.id != solution_id(self.iteration) {
            v.push(format!("{}: id does not match iteration {}", self.id, self.iteration));
        }
        v
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line} is corrupt: {message}")]
    Corrupt { path: String, line: usize, message: String },
    #[error("duplicate solution id {0}")]
    Duplicate(String),
}

/// Append-only JSONL of records, in creation order.
#[derive(Debug)]
pub struct SolutionStore {
    path: PathBuf,
    records: Vec<SolutionRecord>,
    index: HashMap<String, usize>,
    file: Option<File>,
}

impl SolutionStore {
    /// Reads an existing store without opening it for appends.
    pub fn load(path: &Path) -> Result<Self, StoreError> {
        let io = |source| StoreError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut s = Self {
            path: path.to_path_buf(),
            records: Vec::new(),
            index: HashMap::new(),
            file: None,
        };
        if !path.exists() {
            return Ok(s);
        }
        let f = File::open(path).map_err(io)?;
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: SolutionRecord = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                path: path.display().to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
            s.insert(rec)?;
        }
        Ok(s)
    }

    /// Loads and keeps the file open for appends.
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let mut s = Self::load(path)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| StoreError::Io {
                path: dir.display().to_string(),
                source,
            })?;
        }
        s.file = Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| StoreError::Io {
                    path: path.display().to_string(),
                    source,
                })?,
        );
        Ok(s)
    }

    fn insert(&mut self, rec: SolutionRecord) -> Result<(), StoreError> {
        if self.index.contains_key(&rec.id) {
            return Err(StoreError::Duplicate(rec.id));
        }
        self.index.insert(rec.id.clone(), self.records.len());
        self.records.push(rec);
        Ok(())
    }

    /// Writes the record as one complete line, then indexes it.
    pub fn append(&mut self, rec: SolutionRecord) -> Result<(), StoreError> {
        if self.index.contains_key(&rec.id) {
            return Err(StoreError::Duplicate(rec.id));
        }
        let mut line = serde_json::to_string(&rec).expect("serializable record");
        line.push('\n');
        let path = self.path.display().to_string();
        let f = self.file.as_mut().ok_or_else(|| StoreError::Io {
            path: path.clone(),
            source: std::io::Error::other("store opened read-only"),
        })?;
        f.write_all(line.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|source| StoreError::Io { path, source })?;
        self.insert(rec)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> &[SolutionRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&SolutionRecord> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ok_records(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.iter().filter(|r| r.is_ok())
    }

    /// Every record invariant, plus a shared suite when `suite_id` is given.
    pub fn audit(&self, suite_id: Option<&str>) -> Vec<String> {
        let mut v = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            v.extend(r.violations());
            if r.iteration != i as u64 + 1 {
                v.push(format!("{}: out of order at position {}", r.id, i + 1));
            }
            if let (Some(s), Some(e)) = (suite_id, &r.embedding) {
                if e.suite_id != s {
                    v.push(format!("{}: embedding suite {} != {s}", r.id, e.suite_id));
                }
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::Fraction;

    pub(crate) fn record(iteration: u64, ok: bool) -> SolutionRecord {
        SolutionRecord {
            id: solution_id(iteration),
            iteration,
            strategy: Strategy::Rsdict,
            selection: Selection::Random,
            stimuli: Some(vec!["zebra".into()]),
            steering: None,
            transcripts: Vec::new(),
            design: Some(DesignDoc(Default::default())),
            code: Some("# forge-builtin: lru".into()),
            status: if ok { Status::Ok } else { Status::BadModule },
            embedding: ok.then(|| FeedbackEmbedding::new("s", vec![Fraction::new(1, 2)])),
            cost: Cost { calls: 2, prompt_tokens: 10, completion_tokens: 5, usd: "0.0001".into() },
            models: Models { client: "mock".into(), ideation: "m".into(), coding: "m".into() },
            created_at: "1970-01-01T00:00:01Z".into(),
            error: (!ok).then(|| "no directive".into()),
        }
    }

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solutions.jsonl");
        let mut s = SolutionStore::open(&path).unwrap();
        s.append(record(1, true)).unwrap();
        s.append(record(2, false)).unwrap();
        assert!(matches!(s.append(record(2, true)), Err(StoreError::Duplicate(_))));
        let back = SolutionStore::load(&path).unwrap();
        assert_eq!(back.records(), s.records());
        assert_eq!(back.ok_records().count(), 1);
        assert!(back.audit(Some("s")).is_empty());
        assert_eq!(back.audit(Some("other")).len(), 1);
        assert_eq!(back.get("sol-0002").unwrap().status, Status::BadModule);
    }

    #[test]
    fn corrupt_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solutions.jsonl");
        let good = serde_json::to_string(&record(1, true)).unwrap();
        std::fs::write(&path, format!("{good}\n{{\"id\": \"sol-0002\"\n")).unwrap();
        match SolutionStore::load(&path) {
            Err(StoreError::Corrupt { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected corrupt error, got {other:?}"),
        }
    }

    #[test]
    fn audit_catches_broken_invariants() {
        let mut r = record(1, true);
        r.embedding = None;
        assert_eq!(r.violations().len(), 1);
        let mut r = record(1, true);
        r.strategy = Strategy::Repeated;
        assert_eq!(r.violations().len(), 1);
        assert_eq!(Status::IllegalEviction.to_string(), "illegal_eviction");
    }
}
