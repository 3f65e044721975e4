//! Audio capture: WAV decoding, YIN pitch tracking, note segmentation and
//! quantization onto the beat grid.

mod quantize;
mod segment;
pub mod synth;
mod track;
mod wav;
mod yin;

pub use quantize::{quantize_to_score, CAPTURE_GRID, MIN_CAPTURED_DURATION};
pub use segment::{frequency_to_midi, segment_notes, RawNote, SegmentConfig};
pub use track::{track_pitch, write_pitch_csv, CancelToken, PitchFrame, PitchTrack};
pub use wav::{decode_wav, encode_wav_pcm16, AudioBuffer, MAX_SAMPLE_RATE, MIN_SAMPLE_RATE};
pub use yin::{yin_frame, YinConfig, YinEstimate};

use num_traits::Float;
use thiserror::Error;

use crate::theory::{Score, TheoryError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CaptureError {
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("malformed RIFF/WAVE data: {0}")]
    MalformedRiff(String),
    #[error("no notes were detected in the recording")]
    NoNotesDetected,
    #[error("pitch tracking was cancelled")]
    Cancelled,
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Everything the capture pipeline produced, for debugging dumps.
#[derive(Debug, Clone)]
pub struct Capture<T: Float> {
    pub score: Score,
    pub notes: Vec<RawNote>,
    pub track: PitchTrack<T>,
}

/// decode → track → segment → quantize.
pub fn capture_wav<T: Float>(
    bytes: &[u8],
    bpm: u16,
    yin: &YinConfig<T>,
    seg: &SegmentConfig,
    cancel: &CancelToken,
) -> Result<Capture<T>, CaptureError> {
    let audio = decode_wav::<T>(bytes)?;
    capture_audio(&audio, bpm, yin, seg, cancel)
}

pub fn capture_audio<T: Float>(
    audio: &AudioBuffer<T>,
    bpm: u16,
    yin: &YinConfig<T>,
    seg: &SegmentConfig,
    cancel: &CancelToken,
) -> Result<Capture<T>, CaptureError> {
    crate::theory::check_bpm(bpm)?;
    let track = track_pitch(audio, yin, cancel)?;
    let notes = segment_notes(&track, seg)?;
    let score = quantize_to_score(&notes, bpm)?;
    Ok(Capture { score, notes, track })
}
