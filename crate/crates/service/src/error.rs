use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cadenza_core::capture::CaptureError;
use cadenza_core::explainer::{ExplainError, MentorError};
use cadenza_core::generator::GenerationError;
use cadenza_core::midi::MidiError;
use cadenza_core::piece::PieceError;
use cadenza_core::theory::TheoryError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::{Op, SessionState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ServiceError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("{op} is not allowed while the session is {state}")]
    IllegalState { op: Op, state: SessionState },
    #[error("{0}")]
    Forbidden(String),
    #[error("{message}")]
    Unprocessable { code: &'static str, message: String },
    #[error("{0}")]
    UnsupportedMedia(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("saved session has schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: String, expected: u32 },
    #[error("cannot parse saved session: {0}")]
    Parse(String),
    #[error("replaying the saved session diverged: {0}")]
    ReplayMismatch(String),
    #[error("storage error: {0}")]
    Io(String),
    #[error("mentor: {0}")]
    Mentor(String),
}

impl ServiceError {
    fn unprocessable(code: &'static str, e: impl std::fmt::Display) -> Self {
        ServiceError::Unprocessable { code, message: e.to_string() }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::IllegalState { .. } => StatusCode::CONFLICT,
            ServiceError::Forbidden(_) => StatusCode::FORBIDDEN,
            ServiceError::Unprocessable { .. }
            | ServiceError::SchemaVersionMismatch { .. }
            | ServiceError::Parse(_)
            | ServiceError::ReplayMismatch(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::UnsupportedMedia(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ServiceError::Mentor(_) => StatusCode::BAD_GATEWAY,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::NotFound(_) => "not_found",
            ServiceError::IllegalState { .. } => "illegal_state",
            ServiceError::Forbidden(_) => "not_editable",
            ServiceError::Unprocessable { code, .. } => code,
            ServiceError::UnsupportedMedia(_) => "unsupported_media_type",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::SchemaVersionMismatch { .. } => "schema_version_mismatch",
            ServiceError::Parse(_) => "parse_error",
            ServiceError::ReplayMismatch(_) => "replay_mismatch",
            ServiceError::Io(_) => "storage_error",
            ServiceError::Mentor(_) => "mentor_unavailable",
        }
    }

    /// Problems with the uploaded file itself rather than with the engine.
    pub fn is_input_error(&self) -> bool {
        matches!(self, ServiceError::UnsupportedMedia(_))
            || matches!(self, ServiceError::Unprocessable { code, .. } if matches!(*code, "malformed_input" | "polyphonic_input"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: self.code().to_string(), message: self.to_string() };
        (self.status(), Json(body)).into_response()
    }
}

impl From<MidiError> for ServiceError {
    fn from(e: MidiError) -> Self {
        match e {
            MidiError::PolyphonicInput { .. } => ServiceError::unprocessable("polyphonic_input", e),
            MidiError::Theory(t) => t.into(),
            e => ServiceError::unprocessable("malformed_input", e),
        }
    }
}

impl From<CaptureError> for ServiceError {
    fn from(e: CaptureError) -> Self {
        match e {
            CaptureError::NoNotesDetected => ServiceError::unprocessable("no_notes_detected", e),
            CaptureError::Theory(t) => t.into(),
            CaptureError::Cancelled => ServiceError::unprocessable("cancelled", e),
            e => ServiceError::unprocessable("malformed_input", e),
        }
    }
}

impl From<TheoryError> for ServiceError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::EmptyMelody => ServiceError::unprocessable("no_notes_detected", e),
            TheoryError::BpmOutOfRange(_) => ServiceError::BadRequest(e.to_string()),
            e => ServiceError::unprocessable("theory_error", e),
        }
    }
}

impl From<GenerationError> for ServiceError {
    fn from(e: GenerationError) -> Self {
        match e {
            GenerationError::CorpusExhausted { .. } => ServiceError::unprocessable("corpus_exhausted", e),
            GenerationError::InvalidConfig(_) => ServiceError::BadRequest(e.to_string()),
            GenerationError::Theory(t) => t.into(),
            e => ServiceError::unprocessable("generation_error", e),
        }
    }
}

impl From<PieceError> for ServiceError {
    fn from(e: PieceError) -> Self {
        match e {
            PieceError::Ended => ServiceError::IllegalState { op: Op::Continue, state: SessionState::Ended },
            PieceError::MeasureOutOfRange(i) => ServiceError::NotFound(format!("measure {i}")),
            PieceError::NotEditable(_) => ServiceError::Forbidden(e.to_string()),
            PieceError::NotOffered { .. } => ServiceError::unprocessable("not_offered", e),
            PieceError::Generation(g) => g.into(),
            PieceError::Theory(t) => t.into(),
            PieceError::Midi(m) => m.into(),
        }
    }
}

impl From<ExplainError> for ServiceError {
    fn from(e: ExplainError) -> Self {
        match e {
            ExplainError::ScopeOutOfRange(s) => ServiceError::NotFound(s.to_string()),
            e => ServiceError::BadRequest(e.to_string()),
        }
    }
}

impl From<MentorError> for ServiceError {
    fn from(e: MentorError) -> Self {
        match e {
            MentorError::EmptyQuery => ServiceError::BadRequest(e.to_string()),
            MentorError::MentorUnavailable(m) => ServiceError::Mentor(m),
        }
    }
}
