//! Phrase generation: recommendation, substitution, rhythm planning,
//! voicing and ornamentation.

mod harmony;
mod ornament;
mod rng;
mod voicing;

pub use harmony::{
    apply_substitution, diatonic_chord_tones, diatonic_degree, recommend_phrase, substitution_candidates,
    substitution_partners, Phrase,
};
pub use ornament::{add_ornaments, choose_ornament, logical_notes, ornament_count, realize_ornament, LogicalNote};
pub use rng::Rng;
pub use voicing::{
    fold_into, is_strong_onset, left_hand_voicing, nearest_chord_tone, realize_left_hand, realize_right_hand,
    scale_step, snap_to_key, starting_pitch,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusDb;
use crate::theory::{DegreeSymbol, Hand, Key, Measure, Part, Pitch, Score, TheoryError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerationError {
    #[error("every progression in the corpus has been used ({clicks} continues requested)")]
    CorpusExhausted { clicks: usize },
    #[error("rhythm pattern {0} is not in the corpus")]
    UnknownRhythm(u8),
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Inclusive MIDI range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub low: u8,
    pub high: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub seed: u64,
    pub substitution_probability: f64,
    pub ornament_rate: f64,
    pub right_hand_register: Register,
    pub left_hand_register: Register,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 0,
            substitution_probability: 0.2,
            ornament_rate: 0.05,
            right_hand_register: Register { low: 60, high: 84 },
            left_hand_register: Register { low: 36, high: 59 },
        }
    }
}

impl GenerationConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenerationConfig { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: &str| Err(GenerationError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.substitution_probability) {
            return bad("substitution_probability must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.ornament_rate) {
            return bad("ornament_rate must be in [0, 1]");
        }
        for r in [self.right_hand_register, self.left_hand_register] {
            if r.high > 127 || r.high < r.low || r.high - r.low < 11 {
                return bad("registers must span at least an octave within MIDI 0..127");
            }
        }
        let (rh, lh) = (self.right_hand_register, self.left_hand_register);
        if rh.low <= lh.high && lh.low <= rh.high {
            return bad("registers must not overlap");
        }
        // left-hand triads reach a fifth above the lowest root
        if lh.low as u16 + 11 + 7 > 127 {
            return bad("left-hand register too high");
        }
        Ok(())
    }
}

/// Pattern ids for a phrase: the fitted pattern, then two others drawn
/// without replacement, alternating in draw order.
pub fn plan_rhythms(fitted: u8, db: &CorpusDb, rng: &mut Rng, phrase_len: usize) -> Vec<u8> {
    let mut others: Vec<u8> = db.rhythms.iter().map(|r| r.id).filter(|&id| id != fitted).collect();
    let a = others.remove(rng.index(others.len()));
    let b = others.remove(rng.index(others.len()));
    (0..phrase_len)
        .map(|i| match i {
            0 => fitted,
            i if i % 2 == 1 => a,
            _ => b,
        })
        .collect()
}

/// Generation state carried between continues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationState {
    pub key: Key,
    /// Input degrees followed by every generated progression.
    pub context: Vec<DegreeSymbol>,
    pub fitted_rhythm: u8,
    pub phrases: Vec<Phrase>,
}

impl GenerationState {
    pub fn new(key: Key, input_degrees: Vec<DegreeSymbol>, fitted_rhythm: u8) -> Self {
        GenerationState { key, context: input_degrees, fitted_rhythm, phrases: Vec::new() }
    }

    pub fn used_entries(&self) -> Vec<String> {
        self.phrases.iter().map(|p| p.entry_id.clone()).collect()
    }

    pub fn phrase_at(&self, measure: usize) -> Option<(usize, &Phrase)> {
        self.phrases.iter().enumerate().find(|(_, p)| p.measures().contains(&measure))
    }
}

/// Last sounding melody pitch, ornaments resolved to their main note.
pub fn last_melody_pitch(score: &Score) -> Option<Pitch> {
    let part = score.part(Hand::RightHand)?;
    part.measures.iter().rev().find_map(|m| logical_notes(m).last().map(|n| n.pitch))
}

/// Makes sure a left-hand part exists and matches the right hand's length.
pub fn ensure_left_hand(score: &mut Score) {
    let count = score.measure_count();
    let sources: Vec<_> = score
        .part(Hand::RightHand)
        .map(|p| p.measures.iter().map(|m| m.source).collect())
        .unwrap_or_default();
    if score.part(Hand::LeftHand).is_none() {
        score.parts.push(Part::new(Hand::LeftHand));
    }
    let lh = score.part_mut(Hand::LeftHand).expect("just ensured");
    while lh.measures.len() < count {
        let i = lh.measures.len();
        let source = sources.get(i).copied().unwrap_or_default();
        lh.measures.push(Measure::rest(i, source));
    }
}

/// Realizes one phrase into measures without touching the score.
pub fn realize_phrase(
    phrase: &mut Phrase,
    state: &GenerationState,
    db: &CorpusDb,
    config: &GenerationConfig,
    rng: &mut Rng,
    previous: Option<Pitch>,
) -> Result<(Vec<Measure>, Vec<Measure>), GenerationError> {
    phrase.rhythm_plan = plan_rhythms(state.fitted_rhythm, db, rng, phrase.chords.len());
    let mut rh = realize_right_hand(
        &phrase.chords,
        state.key,
        &phrase.rhythm_plan,
        db,
        rng,
        previous,
        phrase.first_measure,
        config.right_hand_register,
    )?;
    add_ornaments(&mut rh.measures, state.key, rng, config.ornament_rate);
    let lh = realize_left_hand(&phrase.chords, phrase.first_measure, config.left_hand_register);
    Ok((rh.measures, lh.measures))
}

/// One "continue": recommend, vary, plan, voice and ornament a phrase, then
/// append it to both hands. Phrase k draws from rng stream k of the seed.
pub fn continue_piece(
    score: &mut Score,
    state: &mut GenerationState,
    db: &CorpusDb,
    config: &GenerationConfig,
) -> Result<Phrase, GenerationError> {
    config.validate()?;
    let mut rng = Rng::for_stream(config.seed, state.phrases.len() as u64);
    let mut phrase = recommend_phrase(
        &state.context,
        state.key,
        db,
        &mut rng,
        &state.used_entries(),
        config.substitution_probability,
    )?;
    ensure_left_hand(score);
    phrase.first_measure = score.measure_count();
    let previous = last_melody_pitch(score);
    let (rh, lh) = realize_phrase(&mut phrase, state, db, config, &mut rng, previous)?;
    score.part_mut(Hand::RightHand).expect("melody part").measures.extend(rh);
    score.part_mut(Hand::LeftHand).expect("left hand part").measures.extend(lh);
    state.context.extend(phrase.progression.iter().copied());
    state.phrases.push(phrase.clone());
    Ok(phrase)
}
