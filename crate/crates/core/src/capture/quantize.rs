use num_traits::ToPrimitive;

use super::RawNote;
use crate::theory::{measure_length, Beats, Hand, Measure, MeasureSource, NoteEvent, Part, Pitch, Score, TheoryError};

/// Captured audio snaps to twelfths of a beat (sixteenths and triplets).
pub const CAPTURE_GRID: i64 = 12;
/// In grid steps: a quarter of a beat.
pub const MIN_CAPTURED_DURATION: i64 = 3;

fn steps(seconds: f64, beat_seconds: f64) -> i64 {
    (seconds / beat_seconds * CAPTURE_GRID as f64).round().to_i64().unwrap_or(0)
}

/// Places notes on the grid with the first onset at beat 0 of measure 1.
/// Gaps become rests, notes crossing a barline are split, and each note keeps
/// at least a quarter beat (later onsets are pushed back if needed).
pub fn quantize_to_score(notes: &[RawNote], bpm: u16) -> Result<Score, TheoryError> {
    let mut score = Score::new(bpm)?;
    let beat = 60.0 / bpm as f64;
    let origin = notes.iter().map(|n| n.start).fold(f64::INFINITY, f64::min);

    let mut placed: Vec<(i64, i64, u8)> = Vec::with_capacity(notes.len());
    let mut cursor = 0i64;
    let mut sorted = notes.to_vec();
    sorted.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
    for n in &sorted {
        let on = steps(n.start - origin, beat).max(cursor);
        let off = steps(n.end - origin, beat).max(on + MIN_CAPTURED_DURATION);
        placed.push((on, off, n.midi));
        cursor = off;
    }

    let bar_steps = (measure_length() * CAPTURE_GRID).to_integer();
    let measure_count = ((cursor + bar_steps - 1) / bar_steps) as usize;
    let mut buckets: Vec<Vec<NoteEvent>> = vec![Vec::new(); measure_count];
    for (on, off, midi) in placed {
        let pitch = Pitch::new(midi)?;
        let mut s = on;
        while s < off {
            let index = (s / bar_steps) as usize;
            let e = off.min((index as i64 + 1) * bar_steps);
            let onset = Beats::new(s - index as i64 * bar_steps, CAPTURE_GRID);
            buckets[index].push(NoteEvent::note(pitch, onset, Beats::new(e - s, CAPTURE_GRID)));
            s = e;
        }
    }
    let measures = buckets
        .into_iter()
        .enumerate()
        .map(|(i, events)| Measure::from_events(i, events, MeasureSource::Input))
        .collect::<Result<Vec<_>, _>>()?;
    score.parts.push(Part { role: Hand::RightHand, measures });
    Ok(score)
}
