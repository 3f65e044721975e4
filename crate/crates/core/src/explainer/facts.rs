//! Pulls checkable musical facts out of explanation text and compares them
//! with the piece they describe.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{cadence_of, ExplanationDoc, Glossary, Scope};
use crate::corpus::CorpusDb;
use crate::generator::logical_notes;
use crate::piece::Piece;
use crate::theory::{progression_string, DegreeSymbol, Hand, Key, OrnamentKind};

const DEGREE: &str = r"b?[IViv]+(?:dim|aug4|maj7|7)?";
const CHORD: &str = r"[A-G][#b]?(?:maj7|m7|dim|aug4|m|7)?";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Fact {
    Key(String),
    Chord(String),
    ChordList(Vec<String>),
    Progression(String),
    Degree(String),
    Pattern(u8),
    Ornament(String),
    Cadence(String),
    StandsInFor(String),
    OrnamentedCount { ornamented: usize, notes: usize },
    Position { position: usize, length: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactViolation {
    pub fact: Fact,
    pub detail: String,
}

struct Patterns {
    key: Regex,
    chord: Regex,
    chord_list: Regex,
    progression: Regex,
    degree: Regex,
    pattern: Regex,
    ornament: Regex,
    cadence: Regex,
    stands_in: Regex,
    ornamented: Regex,
    position: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        key: Regex::new(r"\bkey of ([A-G][#b]? (?:major|minor))\b").unwrap(),
        chord: Regex::new(&format!(r"\b[Tt]he ({CHORD}) chord\b")).unwrap(),
        chord_list: Regex::new(&format!(r"\bchords ({CHORD}(?:, {CHORD})*)(?:[ ,.;]|$)")).unwrap(),
        progression: Regex::new(&format!(r"\bprogression ({DEGREE}(?:-{DEGREE})+)")).unwrap(),
        degree: Regex::new(&format!(r"\bdegree ({DEGREE})(?:[ ,.;]|$)")).unwrap(),
        pattern: Regex::new(r"\bpattern (\d+)\b").unwrap(),
        ornament: Regex::new(r"\b(appoggiatura|mordent|trill)s?\b").unwrap(),
        cadence: Regex::new(r"\b(authentic|plagal|half|deceptive) cadence\b").unwrap(),
        stands_in: Regex::new(&format!(r"\bstands in for ({DEGREE})(?:[ ,.;]|$)")).unwrap(),
        ornamented: Regex::new(r"\b(\d+) of (\d+) melody notes are ornamented\b").unwrap(),
        position: Regex::new(r"\bposition (\d+) of (\d+)\b").unwrap(),
    })
}

/// Facts stated in `text` (plain text, links already rendered).
pub fn extract_facts(text: &str) -> Vec<Fact> {
    let p = patterns();
    let mut out = Vec::new();
    out.extend(p.key.captures_iter(text).map(|c| Fact::Key(c[1].to_string())));
    out.extend(p.chord.captures_iter(text).map(|c| Fact::Chord(c[1].to_string())));
    out.extend(
        p.chord_list.captures_iter(text).map(|c| Fact::ChordList(c[1].split(", ").map(str::to_string).collect())),
    );
    out.extend(p.progression.captures_iter(text).map(|c| Fact::Progression(c[1].to_string())));
    out.extend(p.degree.captures_iter(text).map(|c| Fact::Degree(c[1].to_string())));
    out.extend(p.pattern.captures_iter(text).filter_map(|c| c[1].parse().ok().map(Fact::Pattern)));
    out.extend(p.ornament.captures_iter(text).map(|c| Fact::Ornament(c[1].to_string())));
    out.extend(p.cadence.captures_iter(text).map(|c| Fact::Cadence(c[1].to_string())));
    out.extend(p.stands_in.captures_iter(text).map(|c| Fact::StandsInFor(c[1].to_string())));
    out.extend(p.ornamented.captures_iter(text).map(|c| Fact::OrnamentedCount {
        ornamented: c[1].parse().unwrap_or(usize::MAX),
        notes: c[2].parse().unwrap_or(usize::MAX),
    }));
    out.extend(p.position.captures_iter(text).map(|c| Fact::Position {
        position: c[1].parse().unwrap_or(usize::MAX),
        length: c[2].parse().unwrap_or(usize::MAX),
    }));
    out
}

/// What the piece actually contains within a scope.
#[derive(Debug, Default)]
struct Truth {
    key: String,
    chords: Vec<String>,
    chord_lists: Vec<Vec<String>>,
    progressions: Vec<String>,
    degrees: Vec<String>,
    patterns: Vec<u8>,
    ornaments: Vec<OrnamentKind>,
    cadences: Vec<String>,
    originals: Vec<String>,
    ornamented: usize,
    notes: usize,
    positions: Vec<(usize, usize)>,
}

fn truth(piece: &Piece, scope: Scope) -> Truth {
    let key: Key = piece.key();
    let sp = key.spelling();
    let rh = piece.score.part(Hand::RightHand).expect("melody part");
    let measures: Vec<usize> = match scope {
        Scope::Measure(i) => vec![i],
        Scope::Phrase(j) => piece.phrases()[j].measures().collect(),
        Scope::Piece => (0..piece.measure_count()).collect(),
    };
    let mut t = Truth { key: key.to_string(), ..Truth::default() };
    for &i in &measures {
        let notes = logical_notes(&rh.measures[i]);
        t.notes += notes.len();
        for n in &notes {
            if let Some((kind, _)) = n.ornament {
                t.ornamented += 1;
                t.ornaments.push(kind);
            }
        }
        if let Ok(info) = piece.measure_info(i) {
            t.chords.extend(info.chord.map(|c| c.name(sp)));
            t.degrees.extend(info.degree.map(|d| d.to_string()));
            t.patterns.extend(info.rhythm);
        }
    }
    let phrases: Vec<usize> = match scope {
        Scope::Measure(i) => piece.measure_info(i).ok().and_then(|m| m.phrase).into_iter().collect(),
        Scope::Phrase(j) => vec![j],
        Scope::Piece => (0..piece.phrases().len()).collect(),
    };
    for j in phrases {
        let p = &piece.phrases()[j];
        t.chord_lists.push(p.chords.iter().map(|c| c.name(sp)).collect());
        t.progressions.push(progression_string(&p.progression));
        t.patterns.extend(p.rhythm_plan.iter().copied());
        if let Some(c) = cadence_of(&p.progression) {
            t.cadences.push(c.name().to_string());
        }
        for (k, m) in p.measures().enumerate() {
            if measures.contains(&m) {
                t.positions.push((k + 1, p.progression.len()));
                if p.substituted[k] {
                    t.originals.push(p.original[k].to_string());
                }
            }
        }
    }
    let input: Vec<DegreeSymbol> = piece.analysis.input_progression();
    if scope == Scope::Piece && input.len() > 1 {
        t.progressions.push(progression_string(&input));
    }
    if scope == Scope::Piece || scope == Scope::Measure(0) {
        t.patterns.push(piece.analysis.fitted_rhythm);
    }
    t
}

/// Every fact in the document that the piece contradicts.
pub fn check_facts(doc: &ExplanationDoc, piece: &Piece, db: &CorpusDb) -> Vec<FactViolation> {
    let glossary = Glossary::builtin();
    let text = doc.plain_text(glossary);
    let t = truth(piece, doc.scope);
    let mut out = Vec::new();
    for fact in extract_facts(&text) {
        let ok = match &fact {
            Fact::Key(k) => *k == t.key,
            Fact::Chord(c) => t.chords.contains(c),
            Fact::ChordList(l) => t.chord_lists.contains(l),
            Fact::Progression(p) => t.progressions.contains(p),
            Fact::Degree(d) => t.degrees.contains(d),
            Fact::Pattern(n) => db.rhythm(*n).is_some() && t.patterns.contains(n),
            Fact::Ornament(o) => t.ornaments.iter().any(|k| k.name() == o),
            Fact::Cadence(c) => t.cadences.contains(c),
            Fact::StandsInFor(d) => t.originals.contains(d),
            Fact::OrnamentedCount { ornamented, notes } => *ornamented == t.ornamented && *notes == t.notes,
            Fact::Position { position, length } => t.positions.contains(&(*position, *length)),
        };
        if !ok {
            out.push(FactViolation { detail: format!("{fact:?} not supported by {}", doc.scope), fact });
        }
    }
    out
}
