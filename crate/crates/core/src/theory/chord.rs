use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PitchClass, Spelling, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChordQuality {
    Major,
    Minor,
    Diminished,
    /// Major third plus an augmented fourth over the root (0-4-6).
    Augmented4,
    Major7,
    Minor7,
    Dominant7,
}

impl ChordQuality {
    pub const ALL: [ChordQuality; 7] = [
        ChordQuality::Major,
        ChordQuality::Minor,
        ChordQuality::Diminished,
        ChordQuality::Augmented4,
        ChordQuality::Major7,
        ChordQuality::Minor7,
        ChordQuality::Dominant7,
    ];

    /// Semitone offsets above the root.
    pub fn intervals(self) -> &'static [u8] {
        match self {
            ChordQuality::Major => &[0, 4, 7],
            ChordQuality::Minor => &[0, 3, 7],
            ChordQuality::Diminished => &[0, 3, 6],
            ChordQuality::Augmented4 => &[0, 4, 6],
            ChordQuality::Major7 => &[0, 4, 7, 11],
            ChordQuality::Minor7 => &[0, 3, 7, 10],
            ChordQuality::Dominant7 => &[0, 4, 7, 10],
        }
    }

    pub fn is_seventh(self) -> bool {
        self.intervals().len() == 4
    }

    /// Whether the chord has a major third (written with an upper-case numeral).
    pub fn is_major_based(self) -> bool {
        matches!(
            self,
            ChordQuality::Major | ChordQuality::Augmented4 | ChordQuality::Major7 | ChordQuality::Dominant7
        )
    }

    pub(crate) fn chord_suffix(self) -> &'static str {
        match self {
            ChordQuality::Major => "",
            ChordQuality::Minor => "m",
            ChordQuality::Diminished => "dim",
            ChordQuality::Augmented4 => "aug4",
            ChordQuality::Major7 => "maj7",
            ChordQuality::Minor7 => "m7",
            ChordQuality::Dominant7 => "7",
        }
    }

    /// Plain-language name used in explanations.
    pub fn describe(self) -> &'static str {
        match self {
            ChordQuality::Major => "major",
            ChordQuality::Minor => "minor",
            ChordQuality::Diminished => "diminished",
            ChordQuality::Augmented4 => "augmented-fourth",
            ChordQuality::Major7 => "major seventh",
            ChordQuality::Minor7 => "minor seventh",
            ChordQuality::Dominant7 => "dominant seventh",
        }
    }
}

/// An absolute chord: root pitch class plus quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChordSymbol {
    pub root: PitchClass,
    pub quality: ChordQuality,
}

impl ChordSymbol {
    pub fn new(root: PitchClass, quality: ChordQuality) -> Self {
        ChordSymbol { root, quality }
    }

    /// Chord tones, root first, in stacking order.
    pub fn tones(self) -> Vec<PitchClass> {
        self.quality
            .intervals()
            .iter()
            .map(|&i| self.root.transpose(i as i32))
            .collect()
    }

    /// Root, third and fifth (or the altered fifth for `dim`/`aug4`).
    pub fn triad(self) -> [PitchClass; 3] {
        let tones = self.tones();
        [tones[0], tones[1], tones[2]]
    }

    pub fn contains(self, pc: PitchClass) -> bool {
        self.quality
            .intervals()
            .iter()
            .any(|&i| self.root.transpose(i as i32) == pc)
    }

    /// Number of pitch classes shared with `other`.
    pub fn common_tones(self, other: ChordSymbol) -> usize {
        self.tones().into_iter().filter(|&pc| other.contains(pc)).count()
    }

    pub fn name(self, spelling: Spelling) -> String {
        format!("{}{}", self.root.name(spelling), self.quality.chord_suffix())
    }
}

/// Free-function form of [`ChordSymbol::tones`].
pub fn chord_tones(chord: ChordSymbol) -> Vec<PitchClass> {
    chord.tones()
}

impl fmt::Display for ChordSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name(Spelling::Sharps))
    }
}

impl FromStr for ChordSymbol {
    type Err = TheoryError;

    /// `note-name ["m"|"dim"|"aug4"|"maj7"|"m7"|"7"]`, e.g. `Em`, `A7`, `C# dim`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (root, rest) = PitchClass::parse_prefix(s.trim())?;
        let quality = match rest.trim() {
            "" => ChordQuality::Major,
            "m" => ChordQuality::Minor,
            "dim" | "°" => ChordQuality::Diminished,
            "aug4" => ChordQuality::Augmented4,
            "maj7" => ChordQuality::Major7,
            "m7" => ChordQuality::Minor7,
            "7" => ChordQuality::Dominant7,
            other => {
                return Err(TheoryError::Parse(format!(
                    "unknown chord quality {other:?} in {s:?}"
                )))
            }
        };
        Ok(ChordSymbol::new(root, quality))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcs(names: &[&str]) -> Vec<PitchClass> {
        names.iter().map(|n| n.parse().unwrap()).collect()
    }

    #[test]
    fn triad_tones() {
        assert_eq!("D".parse::<ChordSymbol>().unwrap().tones(), pcs(&["D", "F#", "A"]));
        assert_eq!("G".parse::<ChordSymbol>().unwrap().tones(), pcs(&["G", "B", "D"]));
        assert_eq!("A".parse::<ChordSymbol>().unwrap().tones(), pcs(&["A", "C#", "E"]));
        assert_eq!("A7".parse::<ChordSymbol>().unwrap().tones(), pcs(&["A", "C#", "E", "G"]));
        assert_eq!("C# dim".parse::<ChordSymbol>().unwrap().tones(), pcs(&["C#", "E", "G"]));
        assert_eq!("Faug4".parse::<ChordSymbol>().unwrap().tones(), pcs(&["F", "A", "B"]));
    }

    #[test]
    fn cardinality_and_root() {
        for root in 0..12 {
            for q in ChordQuality::ALL {
                let c = ChordSymbol::new(PitchClass::new(root), q);
                let tones = c.tones();
                assert_eq!(tones.len(), if q.is_seventh() { 4 } else { 3 });
                assert_eq!(tones[0], c.root);
                let mut dedup = tones.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(dedup.len(), tones.len());
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for root in 0..12 {
            for q in ChordQuality::ALL {
                let c = ChordSymbol::new(PitchClass::new(root), q);
                for sp in [Spelling::Sharps, Spelling::Flats] {
                    assert_eq!(c.name(sp).parse::<ChordSymbol>().unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn common_tone_count() {
        let f: ChordSymbol = "F".parse().unwrap();
        let dm: ChordSymbol = "Dm".parse().unwrap();
        assert_eq!(f.common_tones(dm), 2);
    }

    #[test]
    fn rejects_unknown_quality() {
        assert!("Csus4".parse::<ChordSymbol>().is_err());
        assert!("".parse::<ChordSymbol>().is_err());
    }
}
