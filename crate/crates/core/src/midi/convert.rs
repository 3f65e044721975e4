//! Conversion between SMF documents and scores.

use num_traits::{ToPrimitive, Zero};

use super::smf::{SmfDocument, Track, TrackEvent, TrackEventKind};
use super::MidiError;
use crate::theory::{
    check_bpm, measure_length, Beats, EventKind, Hand, Measure, MeasureSource, NoteEvent, Part, Pitch, Score,
    BEATS_PER_MEASURE, GRID_DENOMINATOR, MAX_BPM, MIN_BPM,
};

/// Output resolution; divisible by 3 and 16.
pub const OUTPUT_DIVISION: u16 = 480;
pub const DEFAULT_BPM: u16 = 120;
pub const VELOCITY: u8 = 80;

/// Microseconds per quarter note for `bpm`, rounded to the nearest integer.
pub fn tempo_for_bpm(bpm: u16) -> u32 {
    let bpm = bpm as u64;
    ((60_000_000 + bpm / 2) / bpm) as u32
}

pub fn bpm_for_tempo(tempo: u32) -> u16 {
    let tempo = tempo.max(1) as u64;
    let bpm = (60_000_000 + tempo / 2) / tempo;
    bpm.clamp(MIN_BPM as u64, MAX_BPM as u64) as u16
}

/// Snaps a tick position to the nearest 1/48-beat grid point (halves round up).
pub fn quantize_ticks(tick: u64, division: u16) -> Beats {
    let d = division as u64;
    let g = GRID_DENOMINATOR as u64;
    let steps = (2 * tick * g + d) / (2 * d);
    Beats::new(steps as i64, GRID_DENOMINATOR)
}

fn beats_to_ticks(b: Beats) -> u64 {
    let t = b * Beats::from_integer(OUTPUT_DIVISION as i64);
    debug_assert!(t.is_integer(), "{b} beats is not a whole number of ticks");
    t.to_integer() as u64
}

#[derive(Debug, Clone, Copy)]
struct RawNote {
    start: u64,
    end: u64,
    key: u8,
}

fn track_notes(track: &Track) -> Vec<RawNote> {
    let mut open: Vec<((u8, u8), u64)> = Vec::new();
    let mut notes = Vec::new();
    for (tick, kind) in track.absolute() {
        if let Some(k) = kind.note_off() {
            if let Some(pos) = open.iter().position(|(n, _)| *n == k) {
                let (_, start) = open.remove(pos);
                notes.push(RawNote { start, end: tick, key: k.1 });
            }
        } else if let Some(k) = kind.note_on() {
            open.push((k, tick));
        }
    }
    notes.sort_by_key(|n| (n.start, n.key));
    notes
}

/// A quantized span within the piece, in beats.
#[derive(Debug, Clone)]
struct Span {
    start: Beats,
    end: Beats,
    pitches: Vec<Pitch>,
}

fn quantize(notes: &[RawNote], division: u16) -> Vec<(Beats, Beats, Pitch)> {
    notes
        .iter()
        .filter_map(|n| {
            let start = quantize_ticks(n.start, division);
            let end = quantize_ticks(n.end, division);
            (end > start).then(|| (start, end, Pitch::new(n.key.min(127)).expect("7-bit key")))
        })
        .collect()
}

fn monophonic_spans(notes: &[RawNote], division: u16) -> Result<Vec<Span>, MidiError> {
    let q = quantize(notes, division);
    let mut spans: Vec<Span> = Vec::with_capacity(q.len());
    for (start, end, pitch) in q {
        if let Some(prev) = spans.last() {
            if start < prev.end {
                return Err(MidiError::PolyphonicInput { beat: start.to_string() });
            }
        }
        spans.push(Span { start, end, pitches: vec![pitch] });
    }
    Ok(spans)
}

/// Groups notes sharing start and end into block chords.
fn chordal_spans(notes: &[RawNote], division: u16) -> Result<Vec<Span>, MidiError> {
    let mut spans: Vec<Span> = Vec::new();
    for (start, end, pitch) in quantize(notes, division) {
        if let Some(prev) = spans.last_mut() {
            if prev.start == start && prev.end == end {
                prev.pitches.push(pitch);
                continue;
            }
            if start < prev.end {
                return Err(MidiError::PolyphonicInput { beat: start.to_string() });
            }
        }
        spans.push(Span { start, end, pitches: vec![pitch] });
    }
    for s in &mut spans {
        s.pitches.sort();
    }
    Ok(spans)
}

fn spans_to_measures(spans: &[Span], measure_count: usize, chordal: bool) -> Result<Vec<Measure>, MidiError> {
    let bar = measure_length();
    let mut buckets: Vec<Vec<NoteEvent>> = vec![Vec::new(); measure_count];
    for span in spans {
        let mut start = span.start;
        while start < span.end {
            let index = (start / bar).floor().to_integer() as usize;
            let bar_end = bar * (index as i64 + 1);
            let end = span.end.min(bar_end);
            let onset = start - bar * index as i64;
            let kind = if chordal {
                EventKind::Chord(span.pitches.clone())
            } else {
                EventKind::Note(span.pitches[0])
            };
            buckets[index].push(NoteEvent { kind, onset, duration: end - start, ornament: None });
            start = end;
        }
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(i, events)| Measure::from_events(i, events, MeasureSource::Input).map_err(MidiError::from))
        .collect()
}

/// Builds a score from a decoded file.
///
/// The first track with notes becomes the right hand and must be monophonic.
/// A second note track becomes the left hand; notes there that start and end
/// together form block chords.
pub fn smf_to_score(doc: &SmfDocument) -> Result<Score, MidiError> {
    let bpm = doc
        .tracks
        .iter()
        .flat_map(|t| t.absolute())
        .find_map(|(_, k)| match k {
            TrackEventKind::Tempo(t) => Some(bpm_for_tempo(*t)),
            _ => None,
        })
        .unwrap_or(DEFAULT_BPM);

    let note_tracks: Vec<Vec<RawNote>> = doc
        .tracks
        .iter()
        .map(track_notes)
        .filter(|n| !n.is_empty())
        .take(2)
        .collect();

    let mut spans = Vec::new();
    for (i, notes) in note_tracks.iter().enumerate() {
        spans.push(if i == 0 { monophonic_spans(notes, doc.division)? } else { chordal_spans(notes, doc.division)? });
    }

    let end_of_music = spans
        .iter()
        .flat_map(|s| s.iter().map(|sp| sp.end))
        .chain(doc.tracks.iter().map(|t| quantize_ticks(t.length_ticks(), doc.division)))
        .max()
        .unwrap_or_else(Beats::zero);
    let measure_count = (end_of_music / measure_length()).ceil().to_integer() as usize;

    let mut score = Score::new(bpm)?;
    let roles = [Hand::RightHand, Hand::LeftHand];
    if spans.is_empty() {
        spans.push(Vec::new());
    }
    for (i, s) in spans.iter().enumerate() {
        let measures = spans_to_measures(s, measure_count, i == 1)?;
        score.parts.push(Part { role: roles[i], measures });
    }
    Ok(score)
}

/// Renders a score as a format-1 file: tempo track, then one track per part.
pub fn score_to_smf(score: &Score) -> Result<SmfDocument, MidiError> {
    check_bpm(score.bpm)?;
    let total = beats_to_ticks(Beats::from_integer(BEATS_PER_MEASURE) * score.measure_count() as i64);

    let tempo_track = Track {
        events: vec![
            TrackEvent { delta: 0, kind: TrackEventKind::Meta { kind: 0x58, data: vec![4, 2, 24, 8] } },
            TrackEvent { delta: 0, kind: TrackEventKind::Tempo(tempo_for_bpm(score.bpm)) },
            TrackEvent { delta: total as u32, kind: TrackEventKind::EndOfTrack },
        ],
    };
    let mut tracks = vec![tempo_track];

    let mut parts: Vec<&Part> = score.parts.iter().collect();
    parts.sort_by_key(|p| match p.role {
        Hand::RightHand => 0,
        Hand::LeftHand => 1,
    });
    for part in parts {
        // (tick, 0 = off / 1 = on, key)
        let mut timed: Vec<(u64, u8, u8)> = Vec::new();
        for (i, m) in part.measures.iter().enumerate() {
            let base = Beats::from_integer(BEATS_PER_MEASURE) * i as i64;
            for ev in &m.events {
                let on = beats_to_ticks(base + ev.onset);
                let off = beats_to_ticks(base + ev.end());
                for p in ev.pitches() {
                    timed.push((on, 1, p.midi()));
                    timed.push((off, 0, p.midi()));
                }
            }
        }
        timed.sort();
        let mut events = vec![TrackEvent { delta: 0, kind: TrackEventKind::Channel { status: 0xc0, data: vec![0] } }];
        let mut last = 0u64;
        for (tick, on, key) in timed {
            let kind = if on == 1 {
                TrackEventKind::NoteOn { channel: 0, key, velocity: VELOCITY }
            } else {
                TrackEventKind::NoteOff { channel: 0, key, velocity: 0 }
            };
            events.push(TrackEvent { delta: (tick - last) as u32, kind });
            last = tick;
        }
        events.push(TrackEvent { delta: (total - last) as u32, kind: TrackEventKind::EndOfTrack });
        tracks.push(Track { events });
    }
    Ok(SmfDocument { format: 1, division: OUTPUT_DIVISION, tracks })
}

/// Total length of a document in beats, using its own division.
pub fn document_beats(doc: &SmfDocument) -> Beats {
    let ticks = doc.tracks.iter().map(|t| t.length_ticks()).max().unwrap_or(0);
    Beats::new(ticks.to_i64().unwrap_or(i64::MAX), doc.division as i64)
}
