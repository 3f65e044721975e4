use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ChordSymbol, Key, Pitch, PitchClass, TheoryError};

/// Exact time in quarter-note beats.
pub type Beats = Ratio<i64>;

/// Every measure is 4/4.
pub const BEATS_PER_MEASURE: i64 = 4;

pub const MIN_BPM: u16 = 20;
pub const MAX_BPM: u16 = 300;

pub fn beats(numer: i64, denom: i64) -> Beats {
    Ratio::new(numer, denom)
}

pub fn measure_length() -> Beats {
    Beats::from_integer(BEATS_PER_MEASURE)
}

/// Finest subdivision a stored duration may use: all denominators divide 48.
pub const GRID_DENOMINATOR: i64 = 48;

pub fn is_on_grid(b: Beats) -> bool {
    GRID_DENOMINATOR % b.denom() == 0
}

pub(crate) mod beats_serde {
    use super::Beats;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &Beats, s: S) -> Result<S::Ok, S::Error> {
        if *b.denom() == 1 {
            s.serialize_str(&b.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", b.numer(), b.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Beats, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_beats(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

/// Parses `3`, `1/3` or `3/2`.
pub fn parse_beats(s: &str) -> Option<Beats> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Beats::new(n, d))
        }
        None => s.parse::<i64>().ok().map(Beats::from_integer),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrnamentKind {
    Appoggiatura,
    Mordent,
    Trill,
}

impl OrnamentKind {
    pub const ALL: [OrnamentKind; 3] = [OrnamentKind::Appoggiatura, OrnamentKind::Mordent, OrnamentKind::Trill];

    pub fn name(self) -> &'static str {
        match self {
            OrnamentKind::Appoggiatura => "appoggiatura",
            OrnamentKind::Mordent => "mordent",
            OrnamentKind::Trill => "trill",
        }
    }
}

/// Marks an event produced by realizing an ornament on one melody note.
///
/// `piece` numbers the literal events of one ornamented note from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrnamentTag {
    pub kind: OrnamentKind,
    pub auxiliary: Pitch,
    pub piece: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "pitches", rename_all = "snake_case")]
pub enum EventKind {
    Rest,
    Note(Pitch),
    /// Simultaneous block chord (left hand).
    Chord(Vec<Pitch>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoteEvent {
    pub kind: EventKind,
    #[serde(with = "beats_serde")]
    pub onset: Beats,
    #[serde(with = "beats_serde")]
    pub duration: Beats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ornament: Option<OrnamentTag>,
}

impl NoteEvent {
    pub fn note(pitch: Pitch, onset: Beats, duration: Beats) -> Self {
        NoteEvent { kind: EventKind::Note(pitch), onset, duration, ornament: None }
    }

    pub fn rest(onset: Beats, duration: Beats) -> Self {
        NoteEvent { kind: EventKind::Rest, onset, duration, ornament: None }
    }

    pub fn chord(pitches: Vec<Pitch>, onset: Beats, duration: Beats) -> Self {
        NoteEvent { kind: EventKind::Chord(pitches), onset, duration, ornament: None }
    }

    pub fn end(&self) -> Beats {
        self.onset + self.duration
    }

    pub fn is_rest(&self) -> bool {
        matches!(self.kind, EventKind::Rest)
    }

    /// Sounding pitches (empty for rests).
    pub fn pitches(&self) -> &[Pitch] {
        match &self.kind {
            EventKind::Rest => &[],
            EventKind::Note(p) => std::slice::from_ref(p),
            EventKind::Chord(ps) => ps,
        }
    }

    /// The single melody pitch, if this is a `Note`.
    pub fn pitch(&self) -> Option<Pitch> {
        match self.kind {
            EventKind::Note(p) => Some(p),
            _ => None,
        }
    }

    /// Whether this event sounds an ornament's auxiliary tone.
    pub fn is_ornament_tone(&self) -> bool {
        matches!((self.ornament, self.pitch()), (Some(tag), Some(p)) if tag.auxiliary == p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSource {
    #[default]
    Input,
    Generated,
    Edited,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measure {
    pub index: usize,
    pub events: Vec<NoteEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chord: Option<ChordSymbol>,
    #[serde(default)]
    pub source: MeasureSource,
}

impl Measure {
    /// A measure holding one whole-measure rest.
    pub fn rest(index: usize, source: MeasureSource) -> Self {
        Measure {
            index,
            events: vec![NoteEvent::rest(Beats::zero(), measure_length())],
            chord: None,
            source,
        }
    }

    /// Builds a measure from events, padding gaps and the tail with rests.
    pub fn from_events(index: usize, mut events: Vec<NoteEvent>, source: MeasureSource) -> Result<Self, TheoryError> {
        events.sort_by_key(|e| e.onset);
        let mut filled = Vec::with_capacity(events.len() + 2);
        let mut cursor = Beats::zero();
        for ev in events {
            if ev.onset < cursor {
                return Err(TheoryError::InvalidMeasure { index, reason: "overlapping events".into() });
            }
            if ev.onset > cursor {
                filled.push(NoteEvent::rest(cursor, ev.onset - cursor));
            }
            cursor = ev.end();
            filled.push(ev);
        }
        if cursor < measure_length() {
            filled.push(NoteEvent::rest(cursor, measure_length() - cursor));
        }
        let m = Measure { index, events: merge_rests(filled), chord: None, source };
        m.validate()?;
        Ok(m)
    }

    /// Checks ordering, contiguity and the 4-beat total.
    pub fn validate(&self) -> Result<(), TheoryError> {
        let fail = |reason: &str| Err(TheoryError::InvalidMeasure { index: self.index, reason: reason.into() });
        let mut cursor = Beats::zero();
        for ev in &self.events {
            if !ev.duration.is_positive() {
                return fail("non-positive duration");
            }
            if ev.onset != cursor {
                return fail("events are not contiguous");
            }
            if !is_on_grid(ev.duration) {
                return fail("duration off the 1/48-beat grid");
            }
            cursor = ev.end();
        }
        if cursor != measure_length() {
            return fail("events do not sum to 4 beats");
        }
        Ok(())
    }

    pub fn total_duration(&self) -> Beats {
        self.events.iter().map(|e| e.duration).sum()
    }

    pub fn sounded_notes(&self) -> impl Iterator<Item = &NoteEvent> {
        self.events.iter().filter(|e| !e.is_rest())
    }

    pub fn has_sound(&self) -> bool {
        self.sounded_notes().next().is_some()
    }

    /// Duration-weighted pitch classes of every sounding pitch.
    pub fn weighted_pitch_classes(&self) -> impl Iterator<Item = (PitchClass, Beats)> + '_ {
        self.events
            .iter()
            .flat_map(|e| e.pitches().iter().map(move |p| (p.pitch_class(), e.duration)))
    }
}

fn merge_rests(events: Vec<NoteEvent>) -> Vec<NoteEvent> {
    let mut out: Vec<NoteEvent> = Vec::with_capacity(events.len());
    for ev in events {
        if let Some(last) = out.last_mut() {
            if last.is_rest() && ev.is_rest() {
                last.duration += ev.duration;
                continue;
            }
        }
        out.push(ev);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hand {
    RightHand,
    LeftHand,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub role: Hand,
    pub measures: Vec<Measure>,
}

impl Part {
    pub fn new(role: Hand) -> Self {
        Part { role, measures: Vec::new() }
    }

    /// Melody notes across all measures, in order.
    pub fn notes(&self) -> impl Iterator<Item = &NoteEvent> {
        self.measures.iter().flat_map(|m| m.sounded_notes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Score {
    pub parts: Vec<Part>,
    pub bpm: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<Key>,
}

impl Score {
    pub fn new(bpm: u16) -> Result<Self, TheoryError> {
        check_bpm(bpm)?;
        Ok(Score { parts: Vec::new(), bpm, key: None })
    }

    /// A single right-hand part.
    pub fn melody(measures: Vec<Measure>, bpm: u16) -> Result<Self, TheoryError> {
        let mut score = Score::new(bpm)?;
        score.parts.push(Part { role: Hand::RightHand, measures });
        Ok(score)
    }

    pub fn part(&self, role: Hand) -> Option<&Part> {
        self.parts.iter().find(|p| p.role == role)
    }

    pub fn part_mut(&mut self, role: Hand) -> Option<&mut Part> {
        self.parts.iter_mut().find(|p| p.role == role)
    }

    pub fn measure_count(&self) -> usize {
        self.parts.iter().map(|p| p.measures.len()).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        check_bpm(self.bpm)?;
        if let Some(first) = self.parts.first() {
            if self.parts.iter().any(|p| p.measures.len() != first.measures.len()) {
                return Err(TheoryError::PartLengthMismatch);
            }
        }
        for m in self.parts.iter().flat_map(|p| &p.measures) {
            m.validate()?;
        }
        Ok(())
    }

    /// Note content only: drops chords, sources, ornament tags and the key.
    pub fn without_annotations(&self) -> Score {
        let mut s = self.clone();
        s.key = None;
        for m in s.parts.iter_mut().flat_map(|p| p.measures.iter_mut()) {
            m.chord = None;
            m.source = MeasureSource::Input;
            for e in &mut m.events {
                e.ornament = None;
            }
        }
        s
    }
}

pub fn check_bpm(bpm: u16) -> Result<(), TheoryError> {
    if !(MIN_BPM..=MAX_BPM).contains(&bpm) {
        return Err(TheoryError::BpmOutOfRange(bpm));
    }
    Ok(())
}
