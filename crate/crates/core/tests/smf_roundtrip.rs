mod common;

use cadenza_core::corpus::CorpusDb;
use cadenza_core::midi::{read_score, write_score};
use cadenza_core::theory::{Beats, Hand, Score};

fn sounding(score: &Score, hand: Hand) -> Vec<(usize, Beats, Beats, Vec<u8>)> {
    score
        .part(hand)
        .map(|p| {
            p.measures
                .iter()
                .flat_map(|m| {
                    m.sounded_notes().map(move |e| (m.index, e.onset, e.duration, e.pitches().iter().map(|p| p.midi()).collect()))
                })
                .collect()
        })
        .unwrap_or_default()
}

#[test]
fn write_then_parse_is_identity_on_generated_scores() {
    let db = CorpusDb::builtin();
    for seed in 0..100u64 {
        let p = common::generated(seed * 7 + 1, 1 + (seed % 3) as usize, seed % 2 == 0, &db);
        let bytes = write_score(&p.score).unwrap();
        let back = read_score(&bytes).unwrap();
        assert_eq!(back.bpm, p.score.bpm, "seed {seed}");
        assert_eq!(back.measure_count(), p.score.measure_count(), "seed {seed}");
        for hand in [Hand::RightHand, Hand::LeftHand] {
            assert_eq!(sounding(&back, hand), sounding(&p.score, hand), "seed {seed} {hand:?}");
        }
        back.validate().unwrap();
        assert_eq!(write_score(&back).unwrap(), bytes, "seed {seed}: byte fixed point");
        assert_eq!(read_score(&bytes).unwrap(), back, "seed {seed}: parse is a function");
    }
}

#[test]
fn export_is_deterministic_per_seed() {
    let db = CorpusDb::builtin();
    for seed in [0u64, 42, 977] {
        let a = common::generated(seed, 2, true, &db).export_midi().unwrap();
        let b = common::generated(seed, 2, true, &db).export_midi().unwrap();
        assert_eq!(a, b);
    }
}
