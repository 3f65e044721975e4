use serde::{Deserialize, Serialize};

use super::{GenerationError, Rng};
use crate::corpus::{rank_progressions, Category, CorpusDb};
use crate::theory::{
    degree_to_chord, diatonic_triads, ChordQuality, ChordSymbol, DegreeSymbol, Key, Mode, PitchClass,
};

/// One recommended progression, after substitution and realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    pub entry_id: String,
    pub category: Category,
    /// Similarity of the entry to the context, as [numerator, denominator].
    pub similarity: [u64; 2],
    /// The corpus entry as written.
    pub original: Vec<DegreeSymbol>,
    /// After substitution; one degree per measure.
    pub progression: Vec<DegreeSymbol>,
    pub chords: Vec<ChordSymbol>,
    pub substituted: Vec<bool>,
    /// Measures changed by the user after generation.
    #[serde(default)]
    pub edited: Vec<bool>,
    pub first_measure: usize,
    pub rhythm_plan: Vec<u8>,
}

impl Phrase {
    pub fn measures(&self) -> std::ops::Range<usize> {
        self.first_measure..self.first_measure + self.progression.len()
    }
}

fn diatonic_seventh_quality(key: Key, degree: u8) -> Option<ChordQuality> {
    let scale = key.diatonic_scale();
    let i = degree as usize - 1;
    let root = scale[i];
    let mut third = scale[(i + 2) % 7];
    if key.mode == Mode::Minor && i == 4 {
        third = key.raised_seventh().expect("minor key");
    }
    let fifth = scale[(i + 4) % 7];
    let seventh = scale[(i + 6) % 7];
    match (root.interval_to(third), root.interval_to(fifth), root.interval_to(seventh)) {
        (4, 7, 11) => Some(ChordQuality::Major7),
        (4, 7, 10) => Some(ChordQuality::Dominant7),
        (3, 7, 10) => Some(ChordQuality::Minor7),
        _ => None,
    }
}

/// The in-key chord for `degree`, as a seventh chord when `seventh` asks for
/// one and the key has a plain seventh chord there. Degree 7 is always the
/// diminished leading-tone triad.
pub fn diatonic_degree(key: Key, degree: u8, seventh: bool) -> DegreeSymbol {
    if degree == 7 {
        return DegreeSymbol::natural(7, ChordQuality::Diminished);
    }
    if seventh {
        if let Some(q) = diatonic_seventh_quality(key, degree) {
            return DegreeSymbol::natural(degree, q);
        }
    }
    diatonic_triads(key)[degree as usize - 1].0
}

/// Degree-level substitution partners: I↔vi, I↔iii, IV↔ii, V↔vii°.
pub fn substitution_partners(degree: u8) -> &'static [u8] {
    match degree {
        1 => &[6, 3],
        6 | 3 => &[1],
        4 => &[2],
        2 => &[4],
        5 => &[7],
        7 => &[5],
        _ => &[],
    }
}

/// In-key replacements for `original` that keep at least two common tones.
pub fn substitution_candidates(original: DegreeSymbol, key: Key) -> Vec<DegreeSymbol> {
    if original.is_altered() {
        return Vec::new();
    }
    let chord = degree_to_chord(original, key);
    substitution_partners(original.degree())
        .iter()
        .map(|&d| diatonic_degree(key, d, original.quality.is_seventh()))
        .filter(|cand| chord.common_tones(degree_to_chord(*cand, key)) >= 2)
        .collect()
}

/// Replaces each interior chord with probability `p` by a common-tone partner.
/// The first and last chords are never touched. One `unit` draw per interior
/// chord, plus one `index` draw when a substitution happens.
pub fn apply_substitution(
    progression: &[DegreeSymbol],
    key: Key,
    rng: &mut Rng,
    p: f64,
) -> (Vec<DegreeSymbol>, Vec<bool>) {
    let mut out = progression.to_vec();
    let mut changed = vec![false; progression.len()];
    if progression.len() < 3 {
        return (out, changed);
    }
    for i in 1..progression.len() - 1 {
        if !rng.chance(p) {
            continue;
        }
        let candidates = substitution_candidates(progression[i], key);
        if candidates.is_empty() {
            continue;
        }
        out[i] = candidates[rng.index(candidates.len())];
        changed[i] = true;
    }
    (out, changed)
}

/// Picks the best-ranked corpus entry not used yet, then varies and realizes it.
pub fn recommend_phrase(
    context: &[DegreeSymbol],
    key: Key,
    db: &CorpusDb,
    rng: &mut Rng,
    used: &[String],
    substitution_probability: f64,
) -> Result<Phrase, GenerationError> {
    let ranked = rank_progressions(context, db, key.mode);
    let pick = ranked
        .iter()
        .find(|r| !used.contains(&r.entry.id))
        .ok_or(GenerationError::CorpusExhausted { clicks: used.len() + 1 })?;
    let (progression, substituted) = apply_substitution(&pick.entry.degrees, key, rng, substitution_probability);
    let chords: Vec<ChordSymbol> = progression.iter().map(|d| degree_to_chord(*d, key)).collect();
    Ok(Phrase {
        entry_id: pick.entry.id.clone(),
        category: pick.entry.category,
        similarity: [*pick.ratio.numer(), *pick.ratio.denom()],
        original: pick.entry.degrees.clone(),
        progression,
        edited: vec![false; chords.len()],
        chords,
        substituted,
        first_measure: 0,
        rhythm_plan: Vec::new(),
    })
}

/// Chord tones of `chord` that belong to `key` (raised seventh included).
pub fn diatonic_chord_tones(chord: ChordSymbol, key: Key) -> Vec<PitchClass> {
    let tones: Vec<PitchClass> = chord.tones().into_iter().filter(|pc| key.contains(*pc)).collect();
    if tones.is_empty() {
        chord.tones()
    } else {
        tones
    }
}
