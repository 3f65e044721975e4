use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::{explain, ExplanationDoc, Level, Scope};
use cadenza_core::generator::GenerationConfig;
use cadenza_core::piece::{Alternatives, EditValue, Piece};
use serde::{Deserialize, Serialize};

use crate::doc::{AnalysisDoc, MeasureDoc, PhraseDoc, ScoreDoc};
use crate::error::ServiceError;
use crate::input::{decode_input, InputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Empty,
    Uploaded,
    Analyzed,
    Extended,
    Ended,
}

impl SessionState {
    pub const ALL: [SessionState; 5] =
        [SessionState::Empty, SessionState::Uploaded, SessionState::Analyzed, SessionState::Extended, SessionState::Ended];
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionState::Empty => "empty",
            SessionState::Uploaded => "uploaded",
            SessionState::Analyzed => "analyzed",
            SessionState::Extended => "extended",
            SessionState::Ended => "ended",
        })
    }
}

/// Every session operation, for the transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Upload,
    Process,
    Continue,
    End,
    Score,
    Export,
    Explain,
    Alternatives,
    Edit,
    Save,
}

impl Op {
    pub const ALL: [Op; 10] =
        [Op::Upload, Op::Process, Op::Continue, Op::End, Op::Score, Op::Export, Op::Explain, Op::Alternatives, Op::Edit, Op::Save];

    pub fn allowed_in(self, state: SessionState) -> bool {
        use SessionState::*;
        match self {
            Op::Upload => state == Empty,
            Op::Process => state == Uploaded,
            Op::Continue | Op::End => matches!(state, Analyzed | Extended),
            Op::Score | Op::Export | Op::Explain | Op::Alternatives => matches!(state, Analyzed | Extended | Ended),
            Op::Edit => state == Extended,
            Op::Save => true,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub format: InputFormat,
    pub bytes: Vec<u8>,
}

/// A successful state-changing request, replayed in order on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Action {
    Process { bpm: Option<u16> },
    Continue,
    End,
    Edit { measure: usize, edit: EditValue },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditRecord {
    pub measure: usize,
    pub field: String,
    pub old: String,
    pub new: String,
    pub timestamp: u64,
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub id: String,
    pub state: SessionState,
    pub config: GenerationConfig,
    pub input: Option<InputFile>,
    pub piece: Option<Piece>,
    pub actions: Vec<Action>,
    pub edit_log: Vec<EditRecord>,
    pub created: u64,
    pub updated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub state: SessionState,
    pub config: GenerationConfig,
    pub phrases: usize,
    pub measures: usize,
    pub edits: usize,
    pub created: u64,
    pub updated: u64,
}

impl Session {
    pub fn new(id: impl Into<String>, config: GenerationConfig) -> Result<Session, ServiceError> {
        config.validate()?;
        let t = now();
        Ok(Session {
            id: id.into(),
            state: SessionState::Empty,
            config,
            input: None,
            piece: None,
            actions: Vec::new(),
            edit_log: Vec::new(),
            created: t,
            updated: t,
        })
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            id: self.id.clone(),
            state: self.state,
            config: self.config,
            phrases: self.piece.as_ref().map_or(0, |p| p.phrases().len()),
            measures: self.piece.as_ref().map_or(0, |p| p.measure_count()),
            edits: self.edit_log.len(),
            created: self.created,
            updated: self.updated,
        }
    }

    pub fn check(&self, op: Op) -> Result<(), ServiceError> {
        if op.allowed_in(self.state) {
            Ok(())
        } else {
            Err(ServiceError::IllegalState { op, state: self.state })
        }
    }

    fn piece(&self) -> &Piece {
        self.piece.as_ref().expect("analyzed sessions hold a piece")
    }

    fn touch(&mut self) {
        self.updated = now();
    }

    pub fn upload(&mut self, bytes: Vec<u8>, file_name: Option<&str>) -> Result<SessionSummary, ServiceError> {
        self.check(Op::Upload)?;
        let format = InputFormat::detect(&bytes, file_name)?;
        if bytes.is_empty() {
            return Err(ServiceError::BadRequest("uploaded file is empty".into()));
        }
        self.input = Some(InputFile { format, bytes });
        self.state = SessionState::Uploaded;
        self.touch();
        Ok(self.summary())
    }

    pub fn process(&mut self, bpm: Option<u16>, db: &CorpusDb) -> Result<AnalysisDoc, ServiceError> {
        self.check(Op::Process)?;
        let input = self.input.as_ref().expect("uploaded sessions hold input");
        let decoded = decode_input(input.format, &input.bytes, bpm)?;
        let piece = Piece::new(decoded.score, db, self.config)?;
        self.piece = Some(piece);
        self.state = SessionState::Analyzed;
        self.actions.push(Action::Process { bpm });
        self.touch();
        Ok(AnalysisDoc::new(self.piece()))
    }

    pub fn continue_phrase(&mut self, db: &CorpusDb) -> Result<PhraseDoc, ServiceError> {
        self.check(Op::Continue)?;
        let piece = self.piece.as_mut().expect("analyzed sessions hold a piece");
        piece.continue_phrase(db)?;
        self.state = SessionState::Extended;
        self.actions.push(Action::Continue);
        self.touch();
        let p = self.piece();
        let j = p.phrases().len() - 1;
        Ok(PhraseDoc::new(p, j))
    }

    pub fn end(&mut self) -> Result<MeasureDoc, ServiceError> {
        self.check(Op::End)?;
        let piece = self.piece.as_mut().expect("analyzed sessions hold a piece");
        piece.end()?;
        self.state = SessionState::Ended;
        self.actions.push(Action::End);
        self.touch();
        let p = self.piece();
        Ok(MeasureDoc::new(p, p.measure_count() - 1))
    }

    pub fn score(&self) -> Result<ScoreDoc, ServiceError> {
        self.check(Op::Score)?;
        Ok(ScoreDoc::new(self.piece(), self.state))
    }

    pub fn export(&self) -> Result<Vec<u8>, ServiceError> {
        self.check(Op::Export)?;
        Ok(self.piece().export_midi()?)
    }

    pub fn explanation(&self, scope: Scope, level: Level, db: &CorpusDb) -> Result<ExplanationDoc, ServiceError> {
        self.check(Op::Explain)?;
        Ok(explain(self.piece(), db, scope, level)?)
    }

    pub fn alternatives(&self, measure: usize) -> Result<Alternatives, ServiceError> {
        self.check(Op::Alternatives)?;
        Ok(self.piece().alternatives(measure)?)
    }

    pub fn edit(&mut self, measure: usize, edit: EditValue, db: &CorpusDb) -> Result<MeasureDoc, ServiceError> {
        self.check(Op::Edit)?;
        let before = self.piece().measure_info(measure)?;
        let (field, old) = match edit {
            EditValue::Degree(_) => ("degree", before.degree.map(|d| d.to_string())),
            EditValue::Rhythm(_) => ("rhythm", before.rhythm.map(|r| r.to_string())),
        };
        let new = match edit {
            EditValue::Degree(d) => d.to_string(),
            EditValue::Rhythm(r) => r.to_string(),
        };
        self.piece.as_mut().expect("extended sessions hold a piece").edit(measure, edit, db)?;
        self.actions.push(Action::Edit { measure, edit });
        self.touch();
        self.edit_log.push(EditRecord {
            measure,
            field: field.to_string(),
            old: old.unwrap_or_default(),
            new,
            timestamp: self.updated,
        });
        Ok(MeasureDoc::new(self.piece(), measure))
    }

    /// Applies a logged action; used when restoring a saved session.
    pub fn apply(&mut self, action: &Action, db: &CorpusDb) -> Result<(), ServiceError> {
        match action {
            Action::Process { bpm } => self.process(*bpm, db).map(drop),
            Action::Continue => self.continue_phrase(db).map(drop),
            Action::End => self.end().map(drop),
            Action::Edit { measure, edit } => self.edit(*measure, *edit, db).map(drop),
        }
    }
}
