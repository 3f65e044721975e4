//! Rhythm fitting on a 1/12-beat raster.

use serde::{Deserialize, Serialize};

use super::{CorpusDb, RhythmPattern, SlotKind};
use crate::theory::{Beats, Measure};

/// 4 beats × 12 slots per beat.
pub const SLOTS_PER_MEASURE: usize = 48;
const SLOTS_PER_BEAT: i64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Onset,
    Sustain,
    Rest,
}

fn slot_start(s: usize) -> Beats {
    Beats::new(s as i64, SLOTS_PER_BEAT)
}

fn rasterize(spans: &[(Beats, Beats)]) -> [Slot; SLOTS_PER_MEASURE] {
    std::array::from_fn(|s| {
        let start = slot_start(s);
        let end = slot_start(s + 1);
        let mut state = Slot::Rest;
        for &(onset, dur) in spans {
            if onset >= start && onset < end {
                return Slot::Onset;
            }
            if onset < start && onset + dur > start {
                state = Slot::Sustain;
            }
        }
        state
    })
}

/// Marks each slot as a note onset, a held note, or silence.
pub fn rasterize_measure(measure: &Measure) -> [Slot; SLOTS_PER_MEASURE] {
    let spans: Vec<_> = measure.sounded_notes().map(|e| (e.onset, e.duration)).collect();
    rasterize(&spans)
}

pub fn rasterize_pattern(pattern: &RhythmPattern) -> [Slot; SLOTS_PER_MEASURE] {
    let spans: Vec<_> = pattern
        .timeline()
        .into_iter()
        .filter(|(_, _, k)| *k == SlotKind::Note)
        .map(|(o, d, _)| (o, d))
        .collect();
    rasterize(&spans)
}

/// Closest pattern by Hamming distance over the raster; ties go to the lowest id.
pub fn fit_rhythm<'a>(measure: &Measure, db: &'a CorpusDb) -> (&'a RhythmPattern, usize) {
    let target = rasterize_measure(measure);
    let mut best: Option<(&RhythmPattern, usize)> = None;
    for pattern in &db.rhythms {
        let grid = rasterize_pattern(pattern);
        let distance = target.iter().zip(grid.iter()).filter(|(a, b)| a != b).count();
        match best {
            Some((p, d)) if d < distance || (d == distance && p.id < pattern.id) => {}
            _ => best = Some((pattern, distance)),
        }
    }
    best.expect("corpus has rhythm patterns")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::theory::{beats, MeasureSource, NoteEvent, Pitch};

    fn measure_from_pattern(p: &RhythmPattern) -> Measure {
        let events = p
            .timeline()
            .into_iter()
            .map(|(o, d, k)| match k {
                SlotKind::Note => NoteEvent::note(Pitch::new(60).unwrap(), o, d),
                SlotKind::Rest => NoteEvent::rest(o, d),
            })
            .collect();
        Measure::from_events(0, events, MeasureSource::Input).unwrap()
    }

    #[test]
    fn every_pattern_fits_itself() {
        let db = CorpusDb::builtin();
        for p in &db.rhythms {
            let (fit, d) = fit_rhythm(&measure_from_pattern(p), &db);
            assert_eq!((fit.id, d), (p.id, 0));
        }
    }

    #[test]
    fn rest_note_rest_note_is_pattern_one() {
        let db = CorpusDb::builtin();
        let c = Pitch::new(60).unwrap();
        let m = Measure::from_events(
            0,
            vec![NoteEvent::note(c, beats(1, 1), beats(1, 1)), NoteEvent::note(c, beats(3, 1), beats(1, 1))],
            MeasureSource::Input,
        )
        .unwrap();
        let (p, d) = fit_rhythm(&m, &db);
        assert_eq!((p.id, d), (1, 0));
    }

    /// Independent slot oracle: count differing slots by direct beat arithmetic.
    #[test]
    fn quarters_against_pattern_one() {
        let db = CorpusDb::builtin();
        let c = Pitch::new(60).unwrap();
        let quarters = Measure::from_events(
            0,
            (0..4).map(|i| NoteEvent::note(c, beats(i, 1), beats(1, 1))).collect(),
            MeasureSource::Input,
        )
        .unwrap();
        let a = rasterize_measure(&quarters);
        let b = rasterize_pattern(db.rhythm(1).unwrap());
        let distance = a.iter().zip(b.iter()).filter(|(x, y)| x != y).count();
        // beats 1 and 3 are sounded in one grid and silent in the other: 2 × 12 slots
        assert_eq!(distance, 24);
        assert_eq!(fit_rhythm(&quarters, &db).0.id, 2);
    }

    #[test]
    fn raster_shape() {
        let db = CorpusDb::builtin();
        let grid = rasterize_pattern(db.rhythm(7).unwrap());
        assert_eq!(grid.iter().filter(|s| **s == Slot::Onset).count(), 12);
        assert!(grid.iter().all(|s| *s != Slot::Rest));
        let rest = Measure::rest(0, MeasureSource::Input);
        assert!(rasterize_measure(&rest).iter().all(|s| *s == Slot::Rest));
        assert!(Beats::zero() < slot_start(1));
    }
}
