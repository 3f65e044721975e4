//! Pitches, keys, chords, roman numerals and the symbolic score, plus the
//! key and harmony detectors that work on them.

mod analysis;
mod chord;
mod degree;
mod key;
mod pitch;
pub(crate) mod score;

pub use analysis::{chord_candidates, detect_chords, detect_measure_chord, detect_scale, tonic_bonus, KeyCandidate, KeyRanking};
pub use chord::{chord_tones, ChordQuality, ChordSymbol};
pub use degree::{
    chord_to_degree, degree_to_chord, diatonic_triads, dominant_seventh, parse_progression, progression_string,
    Alteration, DegreeSymbol, HarmonicFunction,
};
pub use key::{Key, Mode};
pub use pitch::{Pitch, PitchClass, Spelling};
pub use score::{
    beats, check_bpm, is_on_grid, measure_length, parse_beats, Beats, EventKind, Hand, Measure, MeasureSource,
    NoteEvent, OrnamentKind, OrnamentTag, Part, Score, BEATS_PER_MEASURE, GRID_DENOMINATOR, MAX_BPM, MIN_BPM,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("MIDI pitch {0} outside 0..=127")]
    PitchOutOfRange(i32),
    #[error("bpm {0} outside 20..=300")]
    BpmOutOfRange(u16),
    #[error("melody has no sounded notes")]
    EmptyMelody,
    #[error("ambiguous key: {primary} ties with {runner_up}")]
    AmbiguousKey { primary: String, runner_up: String },
    #[error("chord {chord} is not diatonic to {key}")]
    NonDiatonicChord { chord: String, key: String },
    #[error("measure {index}: {reason}")]
    InvalidMeasure { index: usize, reason: String },
    #[error("parts have different measure counts")]
    PartLengthMismatch,
}
