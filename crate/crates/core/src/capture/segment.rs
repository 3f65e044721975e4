use num_traits::Float;

use super::{CaptureError, PitchTrack};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawNote {
    pub start: f64,
    pub end: f64,
    pub midi: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    pub min_note_ms: f64,
    /// Largest distance from the run median, in semitones.
    pub tolerance: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig { min_note_ms: 80.0, tolerance: 0.5 }
    }
}

/// Fractional MIDI number, 69 at 440 Hz.
pub fn midi_float(freq: f64) -> f64 {
    69.0 + 12.0 * (freq / 440.0).log2()
}

pub fn frequency_to_midi(freq: f64) -> u8 {
    midi_float(freq).round().clamp(0.0, 127.0) as u8
}

struct Run {
    first: f64,
    last: f64,
    sorted: Vec<f64>,
}

impl Run {
    fn new(time: f64, f: f64) -> Self {
        Run { first: time, last: time, sorted: vec![f] }
    }

    fn median(&self) -> f64 {
        let n = self.sorted.len();
        if n % 2 == 1 {
            self.sorted[n / 2]
        } else {
            (self.sorted[n / 2 - 1] + self.sorted[n / 2]) / 2.0
        }
    }

    fn push(&mut self, time: f64, f: f64) {
        let at = self.sorted.partition_point(|&v| v < f);
        self.sorted.insert(at, f);
        self.last = time;
    }
}

/// Splits the voiced frames into notes: a run continues while each frame stays
/// within `tolerance` semitones of the run's median so far. Each frame stands
/// for one hop centred on its time.
pub fn segment_notes<T: Float>(track: &PitchTrack<T>, cfg: &SegmentConfig) -> Result<Vec<RawNote>, CaptureError> {
    let half_hop = track.hop_seconds / 2.0;
    let mut notes = Vec::new();
    let mut close = |run: Run| {
        let start = run.first - half_hop;
        let end = run.last + half_hop;
        if (end - start) * 1000.0 + 1e-9 >= cfg.min_note_ms {
            notes.push(RawNote { start: start.max(0.0), end, midi: frequency_to_midi(run.median()) });
        }
    };
    let mut current: Option<Run> = None;
    for frame in &track.frames {
        let Some(f0) = frame.f0.and_then(|f| f.to_f64()) else {
            if let Some(run) = current.take() {
                close(run);
            }
            continue;
        };
        match current.as_mut() {
            Some(run) if (12.0 * (f0 / run.median()).log2()).abs() <= cfg.tolerance => run.push(frame.time, f0),
            _ => {
                if let Some(run) = current.replace(Run::new(frame.time, f0)) {
                    close(run);
                }
            }
        }
    }
    if let Some(run) = current {
        close(run);
    }
    if notes.is_empty() {
        Err(CaptureError::NoNotesDetected)
    } else {
        Ok(notes)
    }
}
