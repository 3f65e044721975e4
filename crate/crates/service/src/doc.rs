//! JSON documents returned by the API.

use cadenza_core::generator::logical_notes;
use cadenza_core::piece::Piece;
use cadenza_core::theory::{progression_string, Hand, Measure, MeasureSource, NoteEvent, Spelling};
use serde::{Deserialize, Serialize};

use crate::session::SessionState;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyCandidateDoc {
    pub key: String,
    pub coverage: String,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisDoc {
    pub key: String,
    pub key_candidates: Vec<KeyCandidateDoc>,
    pub ambiguous: bool,
    pub chords: Vec<Option<String>>,
    pub degrees: Vec<Option<String>>,
    pub fitted_rhythm: u8,
    pub fitted_distance: usize,
    pub bpm: u16,
    pub measures: usize,
    pub warnings: Vec<String>,
}

impl AnalysisDoc {
    pub fn new(piece: &Piece) -> Self {
        let a = &piece.analysis;
        let sp = a.key.spelling();
        AnalysisDoc {
            key: a.key.to_string(),
            key_candidates: a
                .key_candidates
                .iter()
                .map(|c| KeyCandidateDoc { key: c.key.to_string(), coverage: c.coverage.to_string(), weight: c.weight.to_string() })
                .collect(),
            ambiguous: a.ambiguous,
            chords: a.chords.iter().map(|c| c.map(|c| c.name(sp))).collect(),
            degrees: a.degrees.iter().map(|d| d.map(|d| d.to_string())).collect(),
            fitted_rhythm: a.fitted_rhythm,
            fitted_distance: a.fitted_distance,
            bpm: piece.score.bpm,
            measures: a.input_measures(),
            warnings: a.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrnamentDoc {
    pub kind: String,
    pub auxiliary: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDoc {
    /// Beats from the barline, as an exact fraction like `3/2`.
    pub onset: String,
    pub duration: String,
    /// Empty for a rest.
    pub pitches: Vec<u8>,
    pub names: Vec<String>,
    pub ornament: Option<OrnamentDoc>,
}

impl EventDoc {
    fn new(e: &NoteEvent, sp: Spelling) -> Self {
        EventDoc {
            onset: e.onset.to_string(),
            duration: e.duration.to_string(),
            pitches: e.pitches().iter().map(|p| p.midi()).collect(),
            names: e.pitches().iter().map(|p| p.spelled(sp)).collect(),
            ornament: e.ornament.as_ref().map(|o| OrnamentDoc { kind: o.kind.name().to_string(), auxiliary: o.auxiliary.midi() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub index: usize,
    pub source: MeasureSource,
    pub chord: Option<String>,
    pub degree: Option<String>,
    pub rhythm: Option<u8>,
    pub phrase: Option<usize>,
    pub position: Option<usize>,
    pub is_ending: bool,
    pub editable: bool,
    pub ornamented_notes: usize,
    pub right_hand: Vec<EventDoc>,
    pub left_hand: Vec<EventDoc>,
}

fn events(m: Option<&Measure>, sp: Spelling) -> Vec<EventDoc> {
    m.map(|m| m.events.iter().map(|e| EventDoc::new(e, sp)).collect()).unwrap_or_default()
}

impl MeasureDoc {
    pub fn new(piece: &Piece, index: usize) -> Self {
        let info = piece.measure_info(index).expect("index checked by caller");
        let sp = piece.key().spelling();
        let rh = piece.score.part(Hand::RightHand).and_then(|p| p.measures.get(index));
        let lh = piece.score.part(Hand::LeftHand).and_then(|p| p.measures.get(index));
        MeasureDoc {
            index,
            source: info.source,
            chord: info.chord.map(|c| c.name(sp)),
            degree: info.degree.map(|d| d.to_string()),
            rhythm: info.rhythm,
            phrase: info.phrase,
            position: info.position,
            is_ending: info.is_ending,
            editable: info.phrase.is_some() && !piece.ended,
            ornamented_notes: rh.map(|m| logical_notes(m).iter().filter(|n| n.ornament.is_some()).count()).unwrap_or(0),
            right_hand: events(rh, sp),
            left_hand: events(lh, sp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseDoc {
    pub index: usize,
    pub entry_id: String,
    pub category: String,
    pub similarity: String,
    pub first_measure: usize,
    pub length: usize,
    pub original: String,
    pub progression: String,
    pub chords: Vec<String>,
    pub substituted: Vec<bool>,
    pub edited: Vec<bool>,
    pub rhythm_plan: Vec<u8>,
}

impl PhraseDoc {
    pub fn new(piece: &Piece, j: usize) -> Self {
        let p = &piece.phrases()[j];
        let sp = piece.key().spelling();
        PhraseDoc {
            index: j,
            entry_id: p.entry_id.clone(),
            category: p.category.name().to_string(),
            similarity: format!("{}/{}", p.similarity[0], p.similarity[1]),
            first_measure: p.first_measure,
            length: p.progression.len(),
            original: progression_string(&p.original),
            progression: progression_string(&p.progression),
            chords: p.chords.iter().map(|c| c.name(sp)).collect(),
            substituted: p.substituted.clone(),
            edited: p.edited.clone(),
            rhythm_plan: p.rhythm_plan.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreDoc {
    pub state: SessionState,
    pub key: String,
    pub bpm: u16,
    pub beats_per_measure: u8,
    pub measure_count: usize,
    pub input_measures: usize,
    pub ended: bool,
    pub phrases: Vec<PhraseDoc>,
    pub measures: Vec<MeasureDoc>,
}

impl ScoreDoc {
    pub fn new(piece: &Piece, state: SessionState) -> Self {
        ScoreDoc {
            state,
            key: piece.key().to_string(),
            bpm: piece.score.bpm,
            beats_per_measure: 4,
            measure_count: piece.measure_count(),
            input_measures: piece.analysis.input_measures(),
            ended: piece.ended,
            phrases: (0..piece.phrases().len()).map(|j| PhraseDoc::new(piece, j)).collect(),
            measures: (0..piece.measure_count()).map(|i| MeasureDoc::new(piece, i)).collect(),
        }
    }
}
