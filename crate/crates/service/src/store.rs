//! One JSON file per session, rewritten atomically on every append.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use elenchus_core::dialectic::{Session, SessionDocument};
use tokio::sync::Mutex as AsyncMutex;

use crate::oracle_job::OracleSlot;

pub struct Entry {
    pub session: Session,
    pub path: PathBuf,
    pub oracle: OracleSlot,
}

impl Entry {
    /// Writes the log to a temporary file, syncs it and renames it over the
    /// session file.
    pub fn persist(&self, doc: &SessionDocument) -> io::Result<()> {
        write_atomic(&self.path, doc.to_json().as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent() {
        // Directory fsync is best effort; not every platform allows it.
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

pub type Handle = Arc<AsyncMutex<Entry>>;

pub struct Store {
    dir: PathBuf,
    open: Mutex<HashMap<String, Handle>>,
    /// Serializes id allocation.
    create: Mutex<()>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    let s = s.trim_matches('-').to_string();
    let s: String = s.chars().take(40).collect();
    if s.is_empty() {
        "session".into()
    } else {
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session `{0}`")]
    NotFound(String),
    #[error("session file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Store {
            dir,
            open: Mutex::new(HashMap::new()),
            create: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn create(&self, name: &str) -> Result<String, StoreError> {
        let _guard = self.create.lock().unwrap();
        let base = slug(name);
        let id = (1..)
            .map(|n| format!("{base}-{n}"))
            .find(|id| !self.path(id).exists() && !self.open.lock().unwrap().contains_key(id))
            .unwrap();
        let session = Session::new(name);
        let path = self.path(&id);
        write_atomic(&path, session.to_document().to_json().as_bytes())?;
        let entry = Entry {
            session,
            path,
            oracle: OracleSlot::default(),
        };
        self.open
            .lock()
            .unwrap()
            .insert(id.clone(), Arc::new(AsyncMutex::new(entry)));
        Ok(id)
    }

    /// The in-memory session, loading and replaying its file on first use.
    pub fn get(&self, id: &str) -> Result<Handle, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let mut open = self.open.lock().unwrap();
        if let Some(h) = open.get(id) {
            return Ok(h.clone());
        }
        let path = self.path(id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let doc = SessionDocument::from_json(&bytes).map_err(|e| StoreError::Corrupt(e.to_string()))?;
        let session = Session::from_document(doc).map_err(|e| StoreError::Corrupt(e.to_string()))?;
        let handle = Arc::new(AsyncMutex::new(Entry {
            session,
            path,
            oracle: OracleSlot::default(),
        }));
        open.insert(id.to_string(), handle.clone());
        Ok(handle)
    }

    /// Ids of every session file in the data directory.
    pub fn list(&self) -> io::Result<Vec<String>> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let id = name.strip_suffix(".json")?;
                valid_id(id).then(|| id.to_string())
            })
            .collect();
        ids.sort();
        Ok(ids)
    }
}
