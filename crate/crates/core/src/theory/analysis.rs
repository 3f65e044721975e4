use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::degree::{diatonic_triads, dominant_seventh};
use super::{Beats, ChordSymbol, DegreeSymbol, Key, Measure, PitchClass, Score, TheoryError};

/// Bonus added to a key's score for each of: tonic is the first note, the last note, the longest note.
pub fn tonic_bonus() -> Beats {
    Beats::new(1, 10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyCandidate {
    pub key: Key,
    /// Duration-weighted fraction of melody notes inside the key, in [0, 1].
    #[serde(with = "super::score::beats_serde")]
    pub coverage: Beats,
    /// `coverage` plus tonic-emphasis bonuses; the ranking criterion.
    #[serde(with = "super::score::beats_serde")]
    pub weight: Beats,
}

/// All 24 keys ranked best-first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyRanking {
    pub candidates: Vec<KeyCandidate>,
}

impl KeyRanking {
    pub fn best(&self) -> Key {
        self.candidates[0].key
    }

    /// True when the top two candidates tie even after tonic emphasis.
    pub fn is_ambiguous(&self) -> bool {
        self.candidates.len() > 1 && self.candidates[0].weight == self.candidates[1].weight
    }

    /// The ambiguity as an error value, for callers that report it.
    pub fn ambiguity(&self) -> Option<TheoryError> {
        self.is_ambiguous().then(|| TheoryError::AmbiguousKey {
            primary: self.candidates[0].key.to_string(),
            runner_up: self.candidates[1].key.to_string(),
        })
    }
}

fn melody_notes(melody: &Score) -> Vec<(PitchClass, Beats)> {
    melody
        .parts
        .first()
        .map(|part| {
            part.measures
                .iter()
                .flat_map(|m| m.weighted_pitch_classes())
                .collect()
        })
        .unwrap_or_default()
}

/// Ranks every key by how much of the melody it explains.
///
/// Minor keys accept their raised leading tone as in-key. Ties fall back to
/// canonical key order, so the result is fully deterministic.
pub fn detect_scale(melody: &Score) -> Result<KeyRanking, TheoryError> {
    let notes = melody_notes(melody);
    if notes.is_empty() {
        return Err(TheoryError::EmptyMelody);
    }
    let total: Beats = notes.iter().map(|&(_, d)| d).sum();
    let first = notes[0].0;
    let last = notes[notes.len() - 1].0;
    let longest = notes
        .iter()
        .fold(notes[0], |best, &n| if n.1 > best.1 { n } else { best })
        .0;

    let mut candidates: Vec<KeyCandidate> = Key::all()
        .map(|key| {
            let inside: Beats = notes.iter().filter(|(pc, _)| key.contains(*pc)).map(|&(_, d)| d).sum();
            let coverage = inside / total;
            let emphasis = [first, last, longest].iter().filter(|&&pc| pc == key.tonic).count() as i64;
            KeyCandidate { key, coverage, weight: coverage + tonic_bonus() * emphasis }
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.weight
            .cmp(&a.weight)
            .then(a.key.canonical_index().cmp(&b.key.canonical_index()))
    });
    Ok(KeyRanking { candidates })
}

/// Candidate harmonies in tie-break priority order: I, V, IV, vi, ii, iii, vii, then V7.
///
/// V7 comes last so it only wins when its seventh adds coverage.
pub fn chord_candidates(key: Key) -> Vec<(DegreeSymbol, ChordSymbol)> {
    let triads = diatonic_triads(key);
    let mut out: Vec<_> = [1usize, 5, 4, 6, 2, 3, 7].iter().map(|&d| triads[d - 1]).collect();
    out.push(dominant_seventh(key));
    out
}

/// Picks the candidate chord covering the most sounding duration in `measure`.
pub fn detect_measure_chord(measure: &Measure, key: Key) -> Option<ChordSymbol> {
    if !measure.has_sound() {
        return None;
    }
    let mut best: Option<(ChordSymbol, Beats)> = None;
    for (_, chord) in chord_candidates(key) {
        let covered: Beats = measure
            .weighted_pitch_classes()
            .filter(|(pc, _)| chord.contains(*pc))
            .map(|(_, d)| d)
            .sum();
        match best {
            Some((_, c)) if covered <= c => {}
            _ => best = Some((chord, covered)),
        }
    }
    best.map(|(c, _)| c)
}

/// One optional chord per measure of the melody's first part.
pub fn detect_chords(melody: &Score, key: Key) -> Vec<Option<ChordSymbol>> {
    melody
        .parts
        .first()
        .map(|p| p.measures.iter().map(|m| detect_measure_chord(m, key)).collect())
        .unwrap_or_default()
}

impl KeyCandidate {
    pub fn is_zero(&self) -> bool {
        self.coverage.is_zero()
    }
}
