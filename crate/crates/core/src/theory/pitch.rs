use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TheoryError;

/// A pitch class, 0 = C through 11 = B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PitchClass(u8);

impl PitchClass {
    pub const C: PitchClass = PitchClass(0);

    pub fn new(value: i32) -> Self {
        PitchClass(value.rem_euclid(12) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Transposes upward by `semitones` (negative values go down).
    pub fn transpose(self, semitones: i32) -> Self {
        PitchClass::new(self.0 as i32 + semitones)
    }

    /// Upward distance in semitones from `self` to `other`, in 0..12.
    pub fn interval_to(self, other: PitchClass) -> u8 {
        (other.0 + 12 - self.0) % 12
    }

    /// Shortest circular distance, 0..=6.
    pub fn distance(self, other: PitchClass) -> u8 {
        let up = self.interval_to(other);
        up.min(12 - up)
    }

    pub fn name(self, spelling: Spelling) -> &'static str {
        const SHARPS: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];
        const FLATS: [&str; 12] = ["C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B"];
        match spelling {
            Spelling::Sharps => SHARPS[self.0 as usize],
            Spelling::Flats => FLATS[self.0 as usize],
        }
    }

    /// Parses a leading note name (`C`, `F#`, `Bb`) and returns the rest of the input.
    pub(crate) fn parse_prefix(s: &str) -> Result<(PitchClass, &str), TheoryError> {
        let mut chars = s.char_indices();
        let (_, letter) = chars
            .next()
            .ok_or_else(|| TheoryError::Parse(format!("empty note name in {s:?}")))?;
        let base = match letter.to_ascii_uppercase() {
            'C' => 0,
            'D' => 2,
            'E' => 4,
            'F' => 5,
            'G' => 7,
            'A' => 9,
            'B' => 11,
            _ => return Err(TheoryError::Parse(format!("bad note letter in {s:?}"))),
        };
        let mut value = base;
        let mut rest = &s[letter.len_utf8()..];
        loop {
            if let Some(r) = rest.strip_prefix('#').or_else(|| rest.strip_prefix('♯')) {
                value += 1;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('b').or_else(|| rest.strip_prefix('♭')) {
                value -= 1;
                rest = r;
            } else {
                break;
            }
        }
        Ok((PitchClass::new(value), rest))
    }
}

impl fmt::Display for PitchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name(Spelling::Sharps))
    }
}

impl FromStr for PitchClass {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pc, rest) = PitchClass::parse_prefix(s.trim())?;
        if !rest.is_empty() {
            return Err(TheoryError::Parse(format!("trailing input in note name {s:?}")));
        }
        Ok(pc)
    }
}

/// Accidental preference used when naming pitches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spelling {
    #[default]
    Sharps,
    Flats,
}

/// A MIDI note number (60 = middle C, C4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Pitch(u8);

impl Pitch {
    pub fn new(midi: u8) -> Result<Self, TheoryError> {
        if midi > 127 {
            return Err(TheoryError::PitchOutOfRange(midi as i32));
        }
        Ok(Pitch(midi))
    }

    pub fn from_i32(midi: i32) -> Result<Self, TheoryError> {
        if !(0..=127).contains(&midi) {
            return Err(TheoryError::PitchOutOfRange(midi));
        }
        Ok(Pitch(midi as u8))
    }

    pub fn midi(self) -> u8 {
        self.0
    }

    pub fn pitch_class(self) -> PitchClass {
        PitchClass::new(self.0 as i32)
    }

    /// Scientific octave number, C4 = 60.
    pub fn octave(self) -> i32 {
        self.0 as i32 / 12 - 1
    }

    pub fn spelled(self, spelling: Spelling) -> String {
        format!("{}{}", self.pitch_class().name(spelling), self.octave())
    }
}

impl TryFrom<u8> for Pitch {
    type Error = TheoryError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Pitch::new(value)
    }
}

impl From<Pitch> for u8 {
    fn from(p: Pitch) -> u8 {
        p.0
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spelled(Spelling::Sharps))
    }
}

impl FromStr for Pitch {
    type Err = TheoryError;

    /// Parses names like `F#4` or `Bb3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pc, rest) = PitchClass::parse_prefix(s.trim())?;
        let octave: i32 = rest
            .parse()
            .map_err(|_| TheoryError::Parse(format!("bad octave in pitch {s:?}")))?;
        // B#3 and Cb4 cross the octave boundary
        let letter_pc = PitchClass::parse_prefix(&s.trim()[..1])?.0;
        let shift = pc.value() as i32 - letter_pc.value() as i32;
        let wrap = if shift > 6 {
            -12
        } else if shift < -6 {
            12
        } else {
            0
        };
        Pitch::from_i32((octave + 1) * 12 + pc.value() as i32 + wrap)
    }
}
