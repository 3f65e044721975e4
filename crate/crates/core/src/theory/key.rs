use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PitchClass, Spelling, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Major,
    Minor,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Major => "major",
            Mode::Minor => "minor",
        })
    }
}

const MAJOR_STEPS: [u8; 7] = [0, 2, 4, 5, 7, 9, 11];
const NATURAL_MINOR_STEPS: [u8; 7] = [0, 2, 3, 5, 7, 8, 10];

/// Tonic plus mode. There are exactly 24 keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Key {
    pub tonic: PitchClass,
    pub mode: Mode,
}

impl Key {
    pub fn new(tonic: PitchClass, mode: Mode) -> Self {
        Key { tonic, mode }
    }

    pub fn major(tonic: u8) -> Self {
        Key::new(PitchClass::new(tonic as i32), Mode::Major)
    }

    pub fn minor(tonic: u8) -> Self {
        Key::new(PitchClass::new(tonic as i32), Mode::Minor)
    }

    /// All 24 keys in canonical order: C major … B major, then C minor … B minor.
    pub fn all() -> impl Iterator<Item = Key> {
        [Mode::Major, Mode::Minor]
            .into_iter()
            .flat_map(|mode| (0..12).map(move |t| Key::new(PitchClass::new(t), mode)))
    }

    /// Position in the canonical order, 0..24.
    pub fn canonical_index(self) -> usize {
        let base = match self.mode {
            Mode::Major => 0,
            Mode::Minor => 12,
        };
        base + self.tonic.value() as usize
    }

    /// The seven scale degrees ascending from the tonic (natural minor for minor keys).
    pub fn diatonic_scale(self) -> [PitchClass; 7] {
        let steps = match self.mode {
            Mode::Major => MAJOR_STEPS,
            Mode::Minor => NATURAL_MINOR_STEPS,
        };
        steps.map(|s| self.tonic.transpose(s as i32))
    }

    /// The harmonic-minor leading tone, present only for minor keys.
    pub fn raised_seventh(self) -> Option<PitchClass> {
        match self.mode {
            Mode::Major => None,
            Mode::Minor => Some(self.tonic.transpose(11)),
        }
    }

    /// Scale tones plus the raised seventh in minor.
    pub fn contains(self, pc: PitchClass) -> bool {
        self.diatonic_scale().contains(&pc) || self.raised_seventh() == Some(pc)
    }

    pub fn in_scale(self, pc: PitchClass) -> bool {
        self.diatonic_scale().contains(&pc)
    }

    /// Zero-based scale position of `pc`, if it is a scale tone.
    pub fn degree_of(self, pc: PitchClass) -> Option<usize> {
        self.diatonic_scale().iter().position(|&p| p == pc)
    }

    /// Sharp-side keys (zero or more sharps) spell with sharps; flat-side keys with flats.
    pub fn spelling(self) -> Spelling {
        let major_tonic = match self.mode {
            Mode::Major => self.tonic,
            Mode::Minor => self.tonic.transpose(3),
        };
        // F, Bb, Eb, Ab, Db
        match major_tonic.value() {
            5 | 10 | 3 | 8 | 1 => Spelling::Flats,
            _ => Spelling::Sharps,
        }
    }

    pub fn tonic_name(self) -> &'static str {
        self.tonic.name(self.spelling())
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tonic_name(), self.mode)
    }
}

impl FromStr for Key {
    type Err = TheoryError;

    /// Accepts `D major`, `A minor`, `Bb maj`, `c# min`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let tonic: PitchClass = parts
            .next()
            .ok_or_else(|| TheoryError::Parse(format!("empty key {s:?}")))?
            .parse()?;
        let mode = match parts.next().map(|m| m.to_ascii_lowercase()).as_deref() {
            Some("major") | Some("maj") | None => Mode::Major,
            Some("minor") | Some("min") => Mode::Minor,
            Some(other) => return Err(TheoryError::Parse(format!("unknown mode {other:?}"))),
        };
        if parts.next().is_some() {
            return Err(TheoryError::Parse(format!("trailing input in key {s:?}")));
        }
        Ok(Key::new(tonic, mode))
    }
}
