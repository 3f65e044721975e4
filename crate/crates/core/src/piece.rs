//! A piece in progress: the analysed input plus everything generated from it.
//! Both the command line and the HTTP service drive generation through this type.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{fit_rhythm, CorpusDb};
use crate::generator::{
    add_ornaments, continue_piece, ensure_left_hand, last_melody_pitch, logical_notes, realize_left_hand,
    realize_right_hand, GenerationConfig, GenerationError, GenerationState, Phrase, Rng,
};
use crate::midi::{write_score, MidiError};
use crate::theory::{
    chord_to_degree, degree_to_chord, detect_chords, detect_scale, diatonic_triads, dominant_seventh, Beats,
    ChordSymbol, DegreeSymbol, Hand, Key, KeyCandidate, Measure, MeasureSource, NoteEvent, Pitch, PitchClass, Score,
    TheoryError,
};

/// Edits draw from rng streams above every phrase stream.
const EDIT_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PieceError {
    #[error("the piece has ended; only reads and export are allowed")]
    Ended,
    #[error("measure {0} does not exist")]
    MeasureOutOfRange(usize),
    #[error("measure {0} is not a generated phrase measure and cannot be edited")]
    NotEditable(usize),
    #[error("{value} is not one of the offered alternatives for measure {measure}")]
    NotOffered { measure: usize, value: String },
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Midi(#[from] MidiError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub key: Key,
    /// The best three key candidates.
    pub key_candidates: Vec<KeyCandidate>,
    pub ambiguous: bool,
    pub chords: Vec<Option<ChordSymbol>>,
    pub degrees: Vec<Option<DegreeSymbol>>,
    /// Pattern closest to the first input measure.
    pub fitted_rhythm: u8,
    pub fitted_distance: usize,
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn input_measures(&self) -> usize {
        self.chords.len()
    }

    pub fn input_progression(&self) -> Vec<DegreeSymbol> {
        self.degrees.iter().flatten().copied().collect()
    }
}

/// Key, chords, degrees and fitted rhythm of a melody.
pub fn analyze(melody: &Score, db: &CorpusDb) -> Result<Analysis, TheoryError> {
    let ranking = detect_scale(melody)?;
    let key = ranking.best();
    let chords = detect_chords(melody, key);
    let degrees = chords
        .iter()
        .map(|c| c.map(|c| chord_to_degree(c, key)).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    let first = melody
        .part(Hand::RightHand)
        .and_then(|p| p.measures.first())
        .ok_or(TheoryError::EmptyMelody)?;
    let (pattern, distance) = fit_rhythm(first, db);
    let warnings = ranking.ambiguity().map(|e| e.to_string()).into_iter().collect();
    Ok(Analysis {
        key,
        key_candidates: ranking.candidates.iter().take(3).copied().collect(),
        ambiguous: ranking.is_ambiguous(),
        chords,
        degrees,
        fitted_rhythm: pattern.id,
        fitted_distance: distance,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field", content = "value", rename_all = "snake_case")]
pub enum EditValue {
    Degree(DegreeSymbol),
    Rhythm(u8),
}

impl std::fmt::Display for EditValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EditValue::Degree(d) => write!(f, "degree {d}"),
            EditValue::Rhythm(r) => write!(f, "rhythm {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternatives {
    pub degrees: Vec<DegreeSymbol>,
    pub rhythms: Vec<u8>,
}

/// Where a measure came from and what it is built on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureInfo {
    pub index: usize,
    pub source: MeasureSource,
    pub chord: Option<ChordSymbol>,
    pub degree: Option<DegreeSymbol>,
    /// Planned pattern for generated measures, closest pattern for input ones.
    pub rhythm: Option<u8>,
    pub phrase: Option<usize>,
    /// Zero-based position inside the phrase.
    pub position: Option<usize>,
    pub is_ending: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub score: Score,
    pub analysis: Analysis,
    pub generation: GenerationState,
    pub config: GenerationConfig,
    pub ended: bool,
}

impl Piece {
    /// Analyses `input` and prepares it for generation.
    pub fn new(mut input: Score, db: &CorpusDb, config: GenerationConfig) -> Result<Piece, PieceError> {
        config.validate()?;
        input.validate()?;
        let analysis = analyze(&input, db)?;
        input.key = Some(analysis.key);
        if let Some(rh) = input.part_mut(Hand::RightHand) {
            for (m, chord) in rh.measures.iter_mut().zip(&analysis.chords) {
                m.chord = *chord;
                m.source = MeasureSource::Input;
            }
        }
        ensure_left_hand(&mut input);
        let generation = GenerationState::new(analysis.key, analysis.input_progression(), analysis.fitted_rhythm);
        Ok(Piece { score: input, analysis, generation, config, ended: false })
    }

    pub fn key(&self) -> Key {
        self.analysis.key
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.generation.phrases
    }

    pub fn measure_count(&self) -> usize {
        self.score.measure_count()
    }

    fn check_open(&self) -> Result<(), PieceError> {
        if self.ended {
            Err(PieceError::Ended)
        } else {
            Ok(())
        }
    }

    /// Appends the next recommended phrase.
    pub fn continue_phrase(&mut self, db: &CorpusDb) -> Result<&Phrase, PieceError> {
        self.check_open()?;
        continue_piece(&mut self.score, &mut self.generation, db, &self.config)?;
        Ok(self.generation.phrases.last().expect("just pushed"))
    }

    /// Closes with one whole-note tonic measure in both hands.
    pub fn end(&mut self) -> Result<(), PieceError> {
        self.check_open()?;
        ensure_left_hand(&mut self.score);
        let key = self.key();
        let (_, tonic) = diatonic_triads(key)[0];
        let index = self.score.measure_count();
        let reg = self.config.right_hand_register;
        let prev = last_melody_pitch(&self.score).map(|p| p.midi() as i32).unwrap_or(reg.low as i32 + 12);
        let top = (reg.low as i32..=reg.high as i32)
            .filter(|p| PitchClass::new(*p) == key.tonic)
            .min_by_key(|p| ((p - prev).abs(), *p))
            .expect("register spans an octave");
        let mut rh = Measure::from_events(
            index,
            vec![NoteEvent::note(Pitch::from_i32(top)?, Beats::from_integer(0), crate::theory::measure_length())],
            MeasureSource::Generated,
        )?;
        rh.chord = Some(tonic);
        let lh = realize_left_hand(&[tonic], index, self.config.left_hand_register).measures.remove(0);
        self.score.part_mut(Hand::RightHand).expect("melody").measures.push(rh);
        self.score.part_mut(Hand::LeftHand).expect("left hand").measures.push(lh);
        self.ended = true;
        Ok(())
    }

    pub fn measure_info(&self, index: usize) -> Result<MeasureInfo, PieceError> {
        let rh = self
            .score
            .part(Hand::RightHand)
            .and_then(|p| p.measures.get(index))
            .ok_or(PieceError::MeasureOutOfRange(index))?;
        let inputs = self.analysis.input_measures();
        if index < inputs {
            return Ok(MeasureInfo {
                index,
                source: MeasureSource::Input,
                chord: self.analysis.chords[index],
                degree: self.analysis.degrees[index],
                rhythm: (index == 0).then_some(self.analysis.fitted_rhythm),
                phrase: None,
                position: None,
                is_ending: false,
            });
        }
        if let Some((j, phrase)) = self.generation.phrase_at(index) {
            let k = index - phrase.first_measure;
            return Ok(MeasureInfo {
                index,
                source: rh.source,
                chord: Some(phrase.chords[k]),
                degree: Some(phrase.progression[k]),
                rhythm: Some(phrase.rhythm_plan[k]),
                phrase: Some(j),
                position: Some(k),
                is_ending: false,
            });
        }
        Ok(MeasureInfo {
            index,
            source: rh.source,
            chord: rh.chord,
            degree: rh.chord.and_then(|c| chord_to_degree(c, self.key()).ok()),
            rhythm: None,
            phrase: None,
            position: None,
            is_ending: true,
        })
    }

    /// The degrees and rhythms offered for a measure.
    pub fn alternatives(&self, index: usize) -> Result<Alternatives, PieceError> {
        let info = self.measure_info(index)?;
        if info.phrase.is_none() {
            return Err(PieceError::NotEditable(index));
        }
        Ok(self.offered())
    }

    fn offered(&self) -> Alternatives {
        let mut degrees: Vec<DegreeSymbol> = diatonic_triads(self.key()).iter().map(|(d, _)| *d).collect();
        degrees.push(dominant_seventh(self.key()).0);
        Alternatives { degrees, rhythms: (1..=16).collect() }
    }

    /// Rewrites one generated measure under a new degree or rhythm and
    /// re-realizes both hands there. Ornaments are re-rolled from the seed and
    /// the measure index, so repeating an edit gives the same result.
    pub fn edit(&mut self, index: usize, value: EditValue, db: &CorpusDb) -> Result<&Measure, PieceError> {
        self.check_open()?;
        let info = self.measure_info(index)?;
        let (Some(j), Some(k)) = (info.phrase, info.position) else {
            return Err(PieceError::NotEditable(index));
        };
        let offered = self.offered();
        let ok = match value {
            EditValue::Degree(d) => offered.degrees.contains(&d),
            EditValue::Rhythm(r) => offered.rhythms.contains(&r) && db.rhythm(r).is_some(),
        };
        if !ok {
            return Err(PieceError::NotOffered { measure: index, value: value.to_string() });
        }
        let key = self.key();
        {
            let phrase = &mut self.generation.phrases[j];
            match value {
                EditValue::Degree(d) => {
                    phrase.progression[k] = d;
                    phrase.chords[k] = degree_to_chord(d, key);
                    phrase.substituted[k] = false;
                }
                EditValue::Rhythm(r) => phrase.rhythm_plan[k] = r,
            }
            phrase.edited[k] = true;
        }
        let phrase = &self.generation.phrases[j];
        let (chord, rhythm) = (phrase.chords[k], phrase.rhythm_plan[k]);

        let previous = self
            .score
            .part(Hand::RightHand)
            .and_then(|p| p.measures[..index].iter().rev().find_map(|m| logical_notes(m).last().map(|n| n.pitch)));
        let mut rng = Rng::for_stream(self.config.seed, EDIT_STREAM_BASE + index as u64);
        let mut rh =
            realize_right_hand(&[chord], key, &[rhythm], db, &mut rng, previous, index, self.config.right_hand_register)
                .map_err(PieceError::from)?;
        add_ornaments(&mut rh.measures, key, &mut rng, self.config.ornament_rate);
        let mut rh = rh.measures.remove(0);
        rh.source = MeasureSource::Edited;
        let mut lh = realize_left_hand(&[chord], index, self.config.left_hand_register).measures.remove(0);
        lh.source = MeasureSource::Edited;
        self.score.part_mut(Hand::LeftHand).expect("left hand").measures[index] = lh;
        let slot = &mut self.score.part_mut(Hand::RightHand).expect("melody").measures[index];
        *slot = rh;

        let mut context = self.analysis.input_progression();
        for p in &self.generation.phrases {
            context.extend(p.progression.iter().copied());
        }
        self.generation.context = context;
        Ok(&self.score.part(Hand::RightHand).expect("melody").measures[index])
    }

    pub fn export_midi(&self) -> Result<Vec<u8>, PieceError> {
        Ok(write_score(&self.score)?)
    }
}
