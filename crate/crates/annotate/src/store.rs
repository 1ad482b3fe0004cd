//! One pretty-printed JSON file per session under a data directory.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{AnnotateError, Result};
use crate::session::AnnotationSession;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionSummary {
    pub id: String,
    pub revision: u64,
    pub sentences: usize,
    pub annotated: usize,
    pub synsets: usize,
}

impl From<&AnnotationSession> for SessionSummary {
    fn from(s: &AnnotationSession) -> Self {
        SessionSummary {
            id: s.id.clone(),
            revision: s.revision,
            sentences: s.sentences.len(),
            annotated: s.sentences.iter().filter(|r| !r.drafts.is_empty()).count(),
            synsets: s.draft_count(),
        }
    }
}

/// Sessions held in memory and written through to disk. Writes hold the
/// lock until the file is replaced, so writes are serialized.
pub struct SessionStore {
    dir: PathBuf,
    sessions: RwLock<BTreeMap<String, AnnotationSession>>,
}

impl SessionStore {
    /// Opens `dir`, creating it if needed, and loads every `*.json` session.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let io = |source| AnnotateError::Io {
            path: dir.display().to_string(),
            source,
        };
        std::fs::create_dir_all(&dir).map_err(io)?;
        let mut sessions = BTreeMap::new();
        for entry in std::fs::read_dir(&dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let session = load(&path)?;
                sessions.insert(session.id.clone(), session);
            }
        }
        Ok(SessionStore {
            dir,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn list(&self) -> Vec<SessionSummary> {
        self.sessions.read().unwrap().values().map(SessionSummary::from).collect()
    }

    pub fn read<R>(&self, id: &str, f: impl FnOnce(&AnnotationSession) -> Result<R>) -> Result<R> {
        let guard = self.sessions.read().unwrap();
        let session = guard
            .get(id)
            .ok_or_else(|| AnnotateError::NotFound(format!("session {id:?}")))?;
        f(session)
    }

    pub fn create(&self, session: AnnotationSession) -> Result<SessionSummary> {
        let mut guard = self.sessions.write().unwrap();
        if guard.contains_key(&session.id) {
            return Err(AnnotateError::Invalid(format!("session {:?} already exists", session.id)));
        }
        self.persist(&session)?;
        let summary = SessionSummary::from(&session);
        guard.insert(session.id.clone(), session);
        Ok(summary)
    }

    /// Applies `f` to a copy of the session, persists the copy, then makes
    /// it current. On any error the stored session is unchanged.
    pub fn update<R>(&self, id: &str, f: impl FnOnce(&mut AnnotationSession) -> Result<R>) -> Result<R> {
        let mut guard = self.sessions.write().unwrap();
        let current = guard
            .get(id)
            .ok_or_else(|| AnnotateError::NotFound(format!("session {id:?}")))?;
        let mut next = current.clone();
        let out = f(&mut next)?;
        self.persist(&next)?;
        guard.insert(id.to_owned(), next);
        Ok(out)
    }

    fn path_of(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn persist(&self, session: &AnnotationSession) -> Result<()> {
        let path = self.path_of(&session.id);
        let io = |source| AnnotateError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        serde_json::to_writer_pretty(&mut tmp, session).map_err(|e| io(e.into()))?;
        tmp.write_all(b"\n").map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }
}

fn load(path: &Path) -> Result<AnnotationSession> {
    let text = std::fs::read_to_string(path).map_err(|source| AnnotateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| AnnotateError::Corrupt {
        path: path.display().to_string(),
        source,
    })
}
