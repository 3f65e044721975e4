use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ChordQuality, ChordSymbol, Key, Mode, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alteration {
    #[default]
    None,
    Flat,
}

/// Tonal role of a chord within its key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicFunction {
    Tonic,
    Subdominant,
    Dominant,
}

impl HarmonicFunction {
    pub fn term(self) -> &'static str {
        match self {
            HarmonicFunction::Tonic => "tonic",
            HarmonicFunction::Subdominant => "subdominant",
            HarmonicFunction::Dominant => "dominant",
        }
    }
}

/// A chord expressed as a roman numeral relative to a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DegreeSymbol {
    degree: u8,
    pub quality: ChordQuality,
    pub alteration: Alteration,
}

const ROMANS: [&str; 7] = ["I", "II", "III", "IV", "V", "VI", "VII"];

impl DegreeSymbol {
    pub fn new(degree: u8, quality: ChordQuality, alteration: Alteration) -> Result<Self, TheoryError> {
        if !(1..=7).contains(&degree) {
            return Err(TheoryError::Parse(format!("scale degree {degree} outside 1..=7")));
        }
        Ok(DegreeSymbol { degree, quality, alteration })
    }

    pub fn natural(degree: u8, quality: ChordQuality) -> Self {
        DegreeSymbol::new(degree, quality, Alteration::None).expect("degree in 1..=7")
    }

    pub fn degree(self) -> u8 {
        self.degree
    }

    pub fn is_altered(self) -> bool {
        self.alteration != Alteration::None
    }

    pub fn function(self) -> HarmonicFunction {
        match (self.alteration, self.degree) {
            (Alteration::Flat, _) if self.quality == ChordQuality::Dominant7 => HarmonicFunction::Dominant,
            (Alteration::Flat, _) => HarmonicFunction::Subdominant,
            (_, 1 | 3 | 6) => HarmonicFunction::Tonic,
            (_, 2 | 4) => HarmonicFunction::Subdominant,
            _ => HarmonicFunction::Dominant,
        }
    }
}

impl fmt::Display for DegreeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alteration == Alteration::Flat {
            f.write_str("b")?;
        }
        let roman = ROMANS[self.degree as usize - 1];
        if self.quality.is_major_based() {
            f.write_str(roman)?;
        } else {
            f.write_str(&roman.to_ascii_lowercase())?;
        }
        f.write_str(match self.quality {
            ChordQuality::Major | ChordQuality::Minor => "",
            ChordQuality::Diminished => "dim",
            ChordQuality::Augmented4 => "aug4",
            ChordQuality::Major7 => "maj7",
            ChordQuality::Minor7 | ChordQuality::Dominant7 => "7",
        })
    }
}

impl FromStr for DegreeSymbol {
    type Err = TheoryError;

    /// `["b"] roman ["dim"|"°"|"aug4"|"maj7"|"7"]`; numeral case encodes major/minor.
    /// A bare `aug4` is shorthand for `IVaug4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || TheoryError::Parse(format!("invalid degree symbol {s:?}"));
        if s == "aug4" {
            return Ok(DegreeSymbol::natural(4, ChordQuality::Augmented4));
        }
        let (alteration, body) = match s.strip_prefix('b') {
            Some(rest) => (Alteration::Flat, rest),
            None => (Alteration::None, s),
        };
        let numeral_len = body
            .find(|c: char| !matches!(c, 'I' | 'V' | 'i' | 'v'))
            .unwrap_or(body.len());
        let (numeral, suffix) = body.split_at(numeral_len);
        if numeral.is_empty() {
            return Err(bad());
        }
        let upper = numeral.chars().all(|c| c.is_ascii_uppercase());
        let lower = numeral.chars().all(|c| c.is_ascii_lowercase());
        if !upper && !lower {
            return Err(bad());
        }
        let degree = ROMANS
            .iter()
            .position(|r| r.eq_ignore_ascii_case(numeral))
            .ok_or_else(bad)? as u8
            + 1;
        let quality = match (upper, suffix) {
            (true, "") => ChordQuality::Major,
            (false, "") => ChordQuality::Minor,
            (false, "dim") | (false, "°") => ChordQuality::Diminished,
            (true, "aug4") => ChordQuality::Augmented4,
            (true, "maj7") => ChordQuality::Major7,
            (true, "7") => ChordQuality::Dominant7,
            (false, "7") => ChordQuality::Minor7,
            _ => return Err(bad()),
        };
        DegreeSymbol::new(degree, quality, alteration)
    }
}

impl TryFrom<String> for DegreeSymbol {
    type Error = TheoryError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<DegreeSymbol> for String {
    fn from(d: DegreeSymbol) -> String {
        d.to_string()
    }
}

/// Joins degrees with `-`, e.g. `I-IV-V-I`.
pub fn progression_string(degrees: &[DegreeSymbol]) -> String {
    degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("-")
}

/// Parses a progression written with spaces, hyphens or en-dashes between symbols.
pub fn parse_progression(s: &str) -> Result<Vec<DegreeSymbol>, TheoryError> {
    s.split(|c: char| c.is_whitespace() || c == '-' || c == '–' || c == ',')
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Maps an absolute chord to its roman numeral in `key`.
///
/// Roots must be scale tones, the raised seventh of a minor key, or the
/// flattened second degree.
pub fn chord_to_degree(chord: ChordSymbol, key: Key) -> Result<DegreeSymbol, TheoryError> {
    if let Some(pos) = key.degree_of(chord.root) {
        return Ok(DegreeSymbol::natural(pos as u8 + 1, chord.quality));
    }
    if key.raised_seventh() == Some(chord.root) {
        return Ok(DegreeSymbol::natural(7, chord.quality));
    }
    if key.diatonic_scale()[1].transpose(-1) == chord.root {
        return DegreeSymbol::new(2, chord.quality, Alteration::Flat);
    }
    Err(TheoryError::NonDiatonicChord { chord: chord.name(key.spelling()), key: key.to_string() })
}

/// Realizes a roman numeral as an absolute chord in `key`.
///
/// In minor keys a diminished seventh-degree chord sits on the raised leading tone.
pub fn degree_to_chord(degree: DegreeSymbol, key: Key) -> ChordSymbol {
    let scale = key.diatonic_scale();
    let mut root = scale[degree.degree as usize - 1];
    if degree.alteration == Alteration::Flat {
        root = root.transpose(-1);
    } else if key.mode == Mode::Minor && degree.degree == 7 && degree.quality == ChordQuality::Diminished {
        root = key.raised_seventh().expect("minor key");
    }
    ChordSymbol::new(root, degree.quality)
}

fn quality_of(intervals: (u8, u8)) -> ChordQuality {
    match intervals {
        (4, 7) => ChordQuality::Major,
        (3, 7) => ChordQuality::Minor,
        (3, 6) => ChordQuality::Diminished,
        (4, 6) => ChordQuality::Augmented4,
        other => unreachable!("stacked diatonic thirds gave {other:?}"),
    }
}

/// The seven triads built by stacking scale thirds; minor keys use a major V.
pub fn diatonic_triads(key: Key) -> [(DegreeSymbol, ChordSymbol); 7] {
    let scale = key.diatonic_scale();
    std::array::from_fn(|i| {
        let root = scale[i];
        let mut third = scale[(i + 2) % 7];
        let fifth = scale[(i + 4) % 7];
        if key.mode == Mode::Minor && i == 4 {
            third = key.raised_seventh().expect("minor key");
        }
        let quality = quality_of((root.interval_to(third), root.interval_to(fifth)));
        let chord = ChordSymbol::new(root, quality);
        (DegreeSymbol::natural(i as u8 + 1, quality), chord)
    })
}

/// The dominant seventh (V7) of `key`, using the raised leading tone in minor.
pub fn dominant_seventh(key: Key) -> (DegreeSymbol, ChordSymbol) {
    let d = DegreeSymbol::natural(5, ChordQuality::Dominant7);
    (d, degree_to_chord(d, key))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(s: &str) -> DegreeSymbol {
        s.parse().unwrap()
    }

    fn chord(s: &str) -> ChordSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn d_major_triads() {
        let names: Vec<(String, String)> = diatonic_triads(Key::major(2))
            .iter()
            .map(|(d, c)| (d.to_string(), c.name(Key::major(2).spelling())))
            .collect();
        let expected = [
            ("I", "D"),
            ("ii", "Em"),
            ("iii", "F#m"),
            ("IV", "G"),
            ("V", "A"),
            ("vi", "Bm"),
            ("viidim", "C#dim"),
        ];
        for (got, want) in names.iter().zip(expected) {
            assert_eq!((got.0.as_str(), got.1.as_str()), want);
        }
    }

    #[test]
    fn minor_dominant_is_major() {
        let triads = diatonic_triads(Key::minor(9));
        assert_eq!(triads[4].1, chord("E"));
        assert_eq!(triads[4].1.tones(), chord("E").tones());
        assert_eq!(triads[0].1, chord("Am"));
        assert_eq!(triads[6].1, chord("G"));
        assert_eq!(dominant_seventh(Key::minor(9)).1, chord("E7"));
    }

    #[test]
    fn chord_degree_examples() {
        let d = Key::major(2);
        assert_eq!(chord_to_degree(chord("D"), d).unwrap(), deg("I"));
        assert_eq!(chord_to_degree(chord("G"), d).unwrap(), deg("IV"));
        assert_eq!(chord_to_degree(chord("Em"), d).unwrap(), deg("ii"));
        assert_eq!(chord_to_degree(chord("Ebmaj7"), d).unwrap(), deg("bIImaj7"));
        assert_eq!(chord_to_degree(chord("G#dim"), Key::minor(9)).unwrap(), deg("viidim"));
        assert!(matches!(
            chord_to_degree(chord("F"), d),
            Err(TheoryError::NonDiatonicChord { .. })
        ));
    }

    #[test]
    fn degree_chord_examples() {
        let d = Key::major(2);
        let got: Vec<ChordSymbol> = parse_progression("I IV V I")
            .unwrap()
            .into_iter()
            .map(|x| degree_to_chord(x, d))
            .collect();
        assert_eq!(got, ["D", "G", "A", "D"].map(chord));
        assert_eq!(degree_to_chord(deg("viidim"), d), chord("C#dim"));
        assert_eq!(degree_to_chord(deg("V7"), d), chord("A7"));
        assert_eq!(degree_to_chord(deg("I"), Key::major(0)), chord("C"));
        assert_eq!(degree_to_chord(deg("IVaug4"), Key::major(0)), chord("Faug4"));
    }

    #[test]
    fn round_trip_all_keys_degrees_qualities() {
        for key in Key::all() {
            for degree in 1..=7 {
                for q in ChordQuality::ALL {
                    let d = DegreeSymbol::natural(degree, q);
                    assert_eq!(chord_to_degree(degree_to_chord(d, key), key).unwrap(), d, "{d} in {key}");
                }
            }
            let bii = deg("bIImaj7");
            assert_eq!(chord_to_degree(degree_to_chord(bii, key), key).unwrap(), bii);
        }
    }

    #[test]
    fn display_parse_round_trip() {
        for degree in 1..=7 {
            for q in ChordQuality::ALL {
                for alt in [Alteration::None, Alteration::Flat] {
                    let d = DegreeSymbol::new(degree, q, alt).unwrap();
                    assert_eq!(d.to_string().parse::<DegreeSymbol>().unwrap(), d);
                }
            }
        }
    }

    #[test]
    fn grammar_details() {
        assert_eq!(deg("iidim").quality, ChordQuality::Diminished);
        assert_eq!(deg("vii°"), deg("viidim"));
        assert_eq!(deg("ii7").quality, ChordQuality::Minor7);
        assert_eq!(deg("V7").quality, ChordQuality::Dominant7);
        assert_eq!(deg("aug4"), deg("IVaug4"));
        assert_eq!(deg("bIImaj7").alteration, Alteration::Flat);
        for bad in ["", "IIX", "Iv", "imaj7", "Idim", "VIII", "x", "b", "iaug4"] {
            assert!(bad.parse::<DegreeSymbol>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn functions() {
        assert_eq!(deg("I").function(), HarmonicFunction::Tonic);
        assert_eq!(deg("IV").function(), HarmonicFunction::Subdominant);
        assert_eq!(deg("V7").function(), HarmonicFunction::Dominant);
        assert_eq!(deg("bII7").function(), HarmonicFunction::Dominant);
    }
}
