mod common;

use cadenza_core::corpus::{similarity_ratio, CorpusDb};
use cadenza_core::midi::{read_score, write_score};
use cadenza_core::theory::{beats, Hand, Measure, MeasureSource, NoteEvent, Pitch, Score};
use num_rational::Ratio;
use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest, ProptestConfig, Strategy};

/// Measures cut into runs of 1/12-beat steps: Some(pitch) for a note, None for a rest.
fn melody() -> impl Strategy<Value = Vec<Vec<(u32, Option<u8>)>>> {
    let measure = prop::collection::vec((1u32..=24, prop::option::weighted(0.8, 40u8..=90)), 1..8).prop_map(|runs| {
        let mut left = 48u32;
        let mut out = Vec::new();
        for (len, p) in runs {
            if left == 0 {
                break;
            }
            let len = len.min(left);
            out.push((len, p));
            left -= len;
        }
        if left > 0 {
            out.push((left, None));
        }
        out
    });
    prop::collection::vec(measure, 1..5)
}

fn build(spec: &[Vec<(u32, Option<u8>)>], bpm: u16) -> Score {
    let measures = spec
        .iter()
        .enumerate()
        .map(|(i, runs)| {
            let mut onset = 0i64;
            let evs = runs
                .iter()
                .map(|&(len, p)| {
                    let (o, d) = (beats(onset, 12), beats(len as i64, 12));
                    onset += len as i64;
                    match p {
                        Some(p) => NoteEvent::note(Pitch::new(p).unwrap(), o, d),
                        None => NoteEvent::rest(o, d),
                    }
                })
                .collect();
            Measure::from_events(i, evs, MeasureSource::Input).unwrap()
        })
        .collect();
    Score::melody(measures, bpm).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smf_round_trip_preserves_notes(spec in melody(), bpm in 20u16..=300) {
        let score = build(&spec, bpm);
        let back = read_score(&write_score(&score).unwrap()).unwrap();
        prop_assert_eq!(back.bpm, bpm);
        let notes = |s: &Score| -> Vec<(usize, Ratio<i64>, Ratio<i64>, u8)> {
            s.part(Hand::RightHand).unwrap().measures.iter()
                .flat_map(|m| m.sounded_notes().map(move |e| (m.index, e.onset, e.duration, e.pitch().unwrap().midi())))
                .collect()
        };
        prop_assert_eq!(notes(&back), notes(&score));
        prop_assert!(back.measure_count() >= 1 && back.measure_count() <= score.measure_count());
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in prop::collection::vec(0u8..4, 0..8), b in prop::collection::vec(0u8..4, 0..8)) {
        let r = similarity_ratio(&a, &b);
        prop_assert!(r >= Ratio::from_integer(0) && r <= Ratio::from_integer(1));
        prop_assert_eq!(similarity_ratio(&a, &a), Ratio::from_integer(1));
        if a.iter().all(|x| !b.contains(x)) && !(a.is_empty() && b.is_empty()) {
            prop_assert_eq!(r, Ratio::from_integer(0));
        }
    }

    #[test]
    fn every_generated_measure_fills_four_beats(seed in any::<u64>()) {
        let db = CorpusDb::builtin();
        let p = common::generated(seed, 2, true, &db);
        for part in &p.score.parts {
            for m in &part.measures {
                prop_assert_eq!(m.total_duration(), beats(4, 1));
                prop_assert!(m.validate().is_ok());
            }
        }
    }
}
