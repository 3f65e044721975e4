use num_traits::Zero;

use super::harmony::diatonic_chord_tones;
use super::{GenerationError, Register, Rng};
use crate::corpus::{CorpusDb, SlotKind};
use crate::theory::{
    measure_length, Beats, ChordSymbol, Hand, Key, Measure, MeasureSource, NoteEvent, Part, Pitch, PitchClass,
};

/// Root-position triad with the root at the lowest register pitch of its class.
pub fn left_hand_voicing(chord: ChordSymbol, register: Register) -> Vec<Pitch> {
    let lo = register.low as i32;
    let root = lo + (chord.root.value() as i32 - lo).rem_euclid(12);
    chord.quality.intervals()[..3]
        .iter()
        .map(|&i| Pitch::from_i32(root + i as i32).expect("left-hand register is in MIDI range"))
        .collect()
}

/// One whole-measure block chord per chord.
pub fn realize_left_hand(chords: &[ChordSymbol], first_measure: usize, register: Register) -> Part {
    let measures = chords
        .iter()
        .enumerate()
        .map(|(i, &chord)| Measure {
            index: first_measure + i,
            events: vec![NoteEvent::chord(left_hand_voicing(chord, register), Beats::zero(), measure_length())],
            chord: Some(chord),
            source: MeasureSource::Generated,
        })
        .collect();
    Part { role: Hand::LeftHand, measures }
}

/// Beat 1 and beat 3 of the measure.
pub fn is_strong_onset(onset: Beats) -> bool {
    onset == Beats::zero() || onset == Beats::from_integer(2)
}

/// The nearest pitch whose class is in the key, ties going up.
pub fn snap_to_key(pitch: i32, key: Key) -> i32 {
    for d in 0..12 {
        for candidate in [pitch + d, pitch - d] {
            if key.contains(PitchClass::new(candidate)) {
                return candidate;
            }
        }
    }
    pitch
}

/// Moves by octaves into the register.
pub fn fold_into(pitch: i32, register: Register) -> i32 {
    let mut p = pitch;
    while p < register.low as i32 {
        p += 12;
    }
    while p > register.high as i32 {
        p -= 12;
    }
    p
}

/// One step along the key's pitch set (raised seventh included in minor).
pub fn scale_step(pitch: i32, up: bool, key: Key) -> i32 {
    let dir = if up { 1 } else { -1 };
    let mut p = pitch + dir;
    while !key.contains(PitchClass::new(p)) {
        p += dir;
    }
    p
}

/// Nearest register pitch whose class is a diatonic tone of `chord`; ties go lower.
pub fn nearest_chord_tone(prev: i32, chord: ChordSymbol, key: Key, register: Register) -> i32 {
    let tones = diatonic_chord_tones(chord, key);
    (register.low as i32..=register.high as i32)
        .filter(|p| tones.contains(&PitchClass::new(*p)))
        .min_by_key(|p| ((p - prev).abs(), *p))
        .expect("register spans an octave")
}

/// Where the melody continues from: the given pitch made diatonic and folded
/// into the register, or the tonic nearest the register centre.
pub fn starting_pitch(previous: Option<Pitch>, key: Key, register: Register) -> i32 {
    match previous {
        Some(p) => fold_into(snap_to_key(p.midi() as i32, key), register),
        None => {
            let centre = (register.low as i32 + register.high as i32) / 2;
            (register.low as i32..=register.high as i32)
                .filter(|p| PitchClass::new(*p) == key.tonic)
                .min_by_key(|p| ((p - centre).abs(), *p))
                .expect("register spans an octave")
        }
    }
}

/// Fills each planned rhythm with pitches: strong-beat onsets take the chord
/// tone nearest the previous pitch, other onsets move one scale step in a
/// random direction, turning back at the register edges.
#[allow(clippy::too_many_arguments)]
pub fn realize_right_hand(
    chords: &[ChordSymbol],
    key: Key,
    rhythm_plan: &[u8],
    db: &CorpusDb,
    rng: &mut Rng,
    previous: Option<Pitch>,
    first_measure: usize,
    register: Register,
) -> Result<Part, GenerationError> {
    let mut prev = starting_pitch(previous, key, register);
    let mut measures = Vec::with_capacity(chords.len());
    for (i, (&chord, &pattern_id)) in chords.iter().zip(rhythm_plan).enumerate() {
        let pattern = db.rhythm(pattern_id).ok_or(GenerationError::UnknownRhythm(pattern_id))?;
        let mut events = Vec::new();
        for (onset, duration, kind) in pattern.timeline() {
            if kind == SlotKind::Rest {
                events.push(NoteEvent::rest(onset, duration));
                continue;
            }
            let pitch = if is_strong_onset(onset) {
                nearest_chord_tone(prev, chord, key, register)
            } else {
                let up = rng.below(2) == 1;
                let next = scale_step(prev, up, key);
                if (register.low as i32..=register.high as i32).contains(&next) {
                    next
                } else {
                    scale_step(prev, !up, key)
                }
            };
            prev = pitch;
            events.push(NoteEvent::note(Pitch::from_i32(pitch)?, onset, duration));
        }
        let mut m = Measure::from_events(first_measure + i, events, MeasureSource::Generated)?;
        m.chord = Some(chord);
        measures.push(m);
    }
    Ok(Part { role: Hand::RightHand, measures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{chord_tones, ChordQuality};

    fn rh() -> Register {
        Register { low: 60, high: 84 }
    }
    fn lh() -> Register {
        Register { low: 36, high: 59 }
    }

    fn chord(s: &str) -> ChordSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example_left_hand() {
        let chords: Vec<ChordSymbol> = ["D", "G", "A", "D"].iter().map(|c| chord(c)).collect();
        let part = realize_left_hand(&chords, 2, lh());
        let got: Vec<Vec<u8>> = part
            .measures
            .iter()
            .map(|m| m.events[0].pitches().iter().map(|p| p.midi()).collect())
            .collect();
        assert_eq!(got, vec![vec![38, 42, 45], vec![43, 47, 50], vec![45, 49, 52], vec![38, 42, 45]]);
        assert!(part.measures.iter().all(|m| m.events.len() == 1 && m.events[0].duration == measure_length()));
        assert_eq!(part.measures[0].index, 2);
    }

    #[test]
    fn diminished_left_hand() {
        let v = left_hand_voicing(chord("C#dim"), lh());
        let names: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["C#2", "E2", "G2"]);
        let pcs: Vec<PitchClass> = v.iter().map(|p| p.pitch_class()).collect();
        assert_eq!(pcs, chord_tones(ChordSymbol::new(PitchClass::new(1), ChordQuality::Diminished)));
    }

    #[test]
    fn empty_left_hand() {
        assert!(realize_left_hand(&[], 0, lh()).measures.is_empty());
    }

    #[test]
    fn clamp_and_nearest_tone_example() {
        let d = Key::major(2);
        assert_eq!(snap_to_key(72, d), 73);
        assert_eq!(starting_pitch(Some(Pitch::new(72).unwrap()), d, rh()), 73);
        assert_eq!(nearest_chord_tone(73, chord("D"), d, rh()), 74);
    }

    #[test]
    fn register_edges_turn_back() {
        let c = Key::major(0);
        assert_eq!(scale_step(84, true, c), 86);
        assert_eq!(scale_step(60, false, c), 59);
        assert_eq!(fold_into(90, rh()), 78);
        assert_eq!(fold_into(40, rh()), 64);
    }

    #[test]
    fn right_hand_follows_plan() {
        let db = CorpusDb::builtin();
        let d = Key::major(2);
        let chords: Vec<ChordSymbol> = ["D", "G", "A", "D"].iter().map(|c| chord(c)).collect();
        let mut rng = Rng::new(5);
        let part = realize_right_hand(&chords, d, &[1, 7, 12, 7], &db, &mut rng, None, 0, rh()).unwrap();
        assert_eq!(part.measures.len(), 4);
        // pattern 1: rest, note, rest, note
        assert!(part.measures[0].events[0].is_rest());
        assert_eq!(part.measures[1].sounded_notes().count(), 12);
        for m in &part.measures {
            m.validate().unwrap();
            for e in m.sounded_notes() {
                let p = e.pitch().unwrap();
                assert!(d.contains(p.pitch_class()));
                assert!((60..=84).contains(&p.midi()));
                if is_strong_onset(e.onset) {
                    assert!(m.chord.unwrap().contains(p.pitch_class()));
                }
            }
        }
    }
}
