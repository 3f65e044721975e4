#![allow(dead_code)]

use cadenza_core::corpus::CorpusDb;
use cadenza_core::generator::GenerationConfig;
use cadenza_core::piece::Piece;
use cadenza_core::theory::{beats, Key, Measure, MeasureSource, NoteEvent, Pitch, Score};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn arpeggios() -> Score {
    let m = |i: usize, ps: [u8; 4]| {
        let evs = ps
            .iter()
            .enumerate()
            .map(|(b, &p)| NoteEvent::note(Pitch::new(p).unwrap(), beats(b as i64, 1), beats(1, 1)))
            .collect();
        Measure::from_events(i, evs, MeasureSource::Input).unwrap()
    };
    Score::melody(vec![m(0, [62, 66, 69, 74]), m(1, [67, 71, 74, 79])], 120).unwrap()
}

/// A tonic-anchored input melody in a random key with corpus rhythms.
pub fn random_melody(seed: u64, db: &CorpusDb) -> Score {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = Key::all().nth(rng.random_range(0..24)).unwrap();
    let scale = key.diatonic_scale();
    let tonic = 60 + key.tonic.value() as i32;
    let len = rng.random_range(1..=3);
    let mut measures = Vec::new();
    for i in 0..len {
        let pattern = &db.rhythms[rng.random_range(0..db.rhythms.len())];
        let mut evs = Vec::new();
        let mut step = 0usize;
        for (onset, dur, kind) in pattern.timeline() {
            if kind == cadenza_core::corpus::SlotKind::Rest {
                evs.push(NoteEvent::rest(onset, dur));
                continue;
            }
            // first measure outlines the tonic triad, later ones wander the scale
            let degree = if i == 0 { [0, 2, 4, 0][step % 4] } else { rng.random_range(0..7) };
            let octave = if i == 0 && step % 4 == 3 { 12 } else { 0 };
            let pc = scale[degree].value() as i32;
            let mut midi = tonic + (pc - key.tonic.value() as i32).rem_euclid(12) + octave;
            if midi > 84 {
                midi -= 12;
            }
            evs.push(NoteEvent::note(Pitch::from_i32(midi).unwrap(), onset, dur));
            step += 1;
        }
        measures.push(Measure::from_events(i, evs, MeasureSource::Input).unwrap());
    }
    Score::melody(measures, rng.random_range(60..=160)).unwrap()
}

pub fn generated(seed: u64, phrases: usize, end: bool, db: &CorpusDb) -> Piece {
    let cfg = GenerationConfig::with_seed(seed);
    let mut p = Piece::new(random_melody(seed, db), db, cfg).unwrap();
    for _ in 0..phrases {
        p.continue_phrase(db).unwrap();
    }
    if end {
        p.end().unwrap();
    }
    p
}
