//! Session files: one versioned JSON document per session, restored by replay.

use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use cadenza_core::corpus::CorpusDb;
use cadenza_core::generator::GenerationConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ServiceError;
use crate::input::InputFormat;
use crate::session::{Action, EditRecord, Session, SessionState};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedInput {
    pub format: InputFormat,
    /// Base64 of the uploaded bytes.
    pub data: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedSession {
    pub schema_version: u32,
    pub id: String,
    pub state: SessionState,
    pub config: GenerationConfig,
    pub corpus_digest: String,
    pub input: Option<SavedInput>,
    pub actions: Vec<Action>,
    pub edit_log: Vec<EditRecord>,
    pub created: u64,
    pub updated: u64,
    /// SHA-256 of the exported MIDI at save time, checked after replay.
    pub export_sha256: Option<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn export_digest(s: &Session) -> Option<String> {
    s.export().ok().map(|b| sha256_hex(&b))
}

impl SavedSession {
    pub fn capture(s: &Session, db: &CorpusDb) -> SavedSession {
        SavedSession {
            schema_version: SCHEMA_VERSION,
            id: s.id.clone(),
            state: s.state,
            config: s.config,
            corpus_digest: db.source_digest.clone(),
            input: s.input.as_ref().map(|i| SavedInput { format: i.format, data: STANDARD.encode(&i.bytes) }),
            actions: s.actions.clone(),
            edit_log: s.edit_log.clone(),
            created: s.created,
            updated: s.updated,
            export_sha256: export_digest(s),
        }
    }

    /// Rebuilds the session by replaying the action log and checks it lands
    /// in the saved state with the saved export.
    pub fn restore(&self, db: &CorpusDb) -> Result<Session, ServiceError> {
        if self.corpus_digest != db.source_digest {
            return Err(ServiceError::ReplayMismatch("session was saved against a different corpus".into()));
        }
        let mut s = Session::new(self.id.clone(), self.config)?;
        if let Some(input) = &self.input {
            let bytes = STANDARD.decode(&input.data).map_err(|e| ServiceError::Parse(format!("input data: {e}")))?;
            s.upload(bytes, Some(match input.format {
                InputFormat::Wav => "input.wav",
                InputFormat::Midi => "input.mid",
            }))?;
        }
        for (n, action) in self.actions.iter().enumerate() {
            s.apply(action, db).map_err(|e| ServiceError::ReplayMismatch(format!("action {n}: {e}")))?;
        }
        if s.state != self.state {
            return Err(ServiceError::ReplayMismatch(format!("replay ends {}, file says {}", s.state, self.state)));
        }
        let same_edits = s.edit_log.len() == self.edit_log.len()
            && s.edit_log
                .iter()
                .zip(&self.edit_log)
                .all(|(a, b)| (a.measure, &a.field, &a.old, &a.new) == (b.measure, &b.field, &b.old, &b.new));
        if !same_edits {
            return Err(ServiceError::ReplayMismatch("edit log does not match the replayed edits".into()));
        }
        if export_digest(&s) != self.export_sha256 {
            return Err(ServiceError::ReplayMismatch("exported MIDI differs from the saved digest".into()));
        }
        s.edit_log = self.edit_log.clone();
        s.created = self.created;
        s.updated = self.updated;
        Ok(s)
    }

    /// Parses a saved file, checking the schema version before anything else.
    pub fn from_json(text: &str) -> Result<SavedSession, ServiceError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ServiceError::Parse(e.to_string()))?;
        match value.get("schema_version") {
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION as u64) => {}
            Some(v) => return Err(ServiceError::SchemaVersionMismatch { found: v.to_string(), expected: SCHEMA_VERSION }),
            None => return Err(ServiceError::SchemaVersionMismatch { found: "none".into(), expected: SCHEMA_VERSION }),
        }
        serde_json::from_value(value).map_err(|e| ServiceError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("saved sessions serialize")
    }
}

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Store {
    pub fn new(dir: impl Into<PathBuf>) -> Store {
        Store { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, id: &str) -> Result<PathBuf, ServiceError> {
        if !valid_id(id) {
            return Err(ServiceError::BadRequest(format!("invalid session id {id:?}")));
        }
        Ok(self.dir.join(format!("{id}.json")))
    }

    pub fn save(&self, s: &Session, db: &CorpusDb) -> Result<PathBuf, ServiceError> {
        let path = self.path(&s.id)?;
        std::fs::create_dir_all(&self.dir).map_err(|e| ServiceError::Io(e.to_string()))?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, SavedSession::capture(s, db).to_json()).map_err(|e| ServiceError::Io(e.to_string()))?;
        std::fs::rename(&tmp, &path).map_err(|e| ServiceError::Io(e.to_string()))?;
        Ok(path)
    }

    pub fn load(&self, id: &str, db: &CorpusDb) -> Result<Session, ServiceError> {
        let path = self.path(id)?;
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ServiceError::NotFound(format!("saved session {id}")))
            }
            Err(e) => return Err(ServiceError::Io(e.to_string())),
        };
        let saved = SavedSession::from_json(&text)?;
        if saved.id != id {
            return Err(ServiceError::Parse(format!("file for {id} holds session {}", saved.id)));
        }
        saved.restore(db)
    }
}
