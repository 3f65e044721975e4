//! Standard MIDI File reading and writing.

mod convert;
mod smf;

pub use convert::{
    bpm_for_tempo, document_beats, quantize_ticks, score_to_smf, smf_to_score, tempo_for_bpm, DEFAULT_BPM,
    OUTPUT_DIVISION, VELOCITY,
};
pub use smf::{parse_smf, write_smf, write_vlq, SmfDocument, Track, TrackEvent, TrackEventKind};

use thiserror::Error;

use crate::theory::{Score, TheoryError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MidiError {
    #[error("malformed MIDI header: {0}")]
    MalformedHeader(String),
    #[error("SMF format {0} is not supported")]
    UnsupportedFormat(u16),
    #[error("truncated chunk at byte {offset}")]
    TruncatedChunk { offset: usize },
    #[error("variable-length quantity longer than 4 bytes at byte {offset}")]
    BadVarLen { offset: usize },
    #[error("data byte without running status at byte {offset}")]
    MissingStatus { offset: usize },
    #[error("note-on for key {key} at tick {tick} has no matching note-off")]
    UnmatchedNoteOn { key: u8, tick: u64 },
    #[error("two notes sound at once near beat {beat}; only melodies are accepted")]
    PolyphonicInput { beat: String },
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

impl MidiError {
    fn shift(self, base: usize) -> Self {
        match self {
            MidiError::TruncatedChunk { offset } => MidiError::TruncatedChunk { offset: offset + base },
            MidiError::BadVarLen { offset } => MidiError::BadVarLen { offset: offset + base },
            other => other,
        }
    }
}

/// Parses bytes straight to a score.
pub fn read_score(bytes: &[u8]) -> Result<Score, MidiError> {
    smf_to_score(&parse_smf(bytes)?)
}

/// Renders a score straight to bytes.
pub fn write_score(score: &Score) -> Result<Vec<u8>, MidiError> {
    Ok(write_smf(&score_to_smf(score)?))
}
