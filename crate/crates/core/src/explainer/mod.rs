//! Level-calibrated explanations of a piece, glossary links and the mentor.

pub mod facts;
mod mentor;
mod text;

pub use mentor::{
    mentor_ask, normalize_query, MentorBackend, MentorConfig, MentorError, MentorExchange, MentorSource, StubMentor,
    DEFAULT_CANNED, DEFAULT_SYSTEM_PROMPT, SYSTEM_PROMPT_VERSION,
};
pub use text::{
    fill, join_and, linked_terms, render_markdown, render_plain, Glossary, GlossaryEntry, Templates,
    DEFAULT_GLOSSARY, DEFAULT_TEMPLATES,
};

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusDb;
use crate::generator::{choose_ornament, logical_notes, LogicalNote, Phrase};
use crate::piece::{MeasureInfo, Piece};
use crate::theory::{
    Beats, ChordSymbol, DegreeSymbol, Hand, HarmonicFunction, Key, Measure, MeasureSource, OrnamentKind, Pitch,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplainError {
    #[error("{0} is out of range for this piece")]
    ScopeOutOfRange(Scope),
    #[error("cannot parse {0:?} as a scope (measure:N, phrase:N or piece)")]
    BadScope(String),
    #[error("unknown level {0:?} (beginner, intermediate or advanced)")]
    BadLevel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Scope {
    Measure(usize),
    Phrase(usize),
    Piece,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Measure(i) => write!(f, "measure:{i}"),
            Scope::Phrase(j) => write!(f, "phrase:{j}"),
            Scope::Piece => f.write_str("piece"),
        }
    }
}

impl FromStr for Scope {
    type Err = ExplainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExplainError::BadScope(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        if t == "piece" {
            return Ok(Scope::Piece);
        }
        let (kind, n) = t.split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "measure" => Ok(Scope::Measure(n)),
            "phrase" => Ok(Scope::Phrase(n)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Beginner,
    Intermediate,
    Advanced,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Beginner, Level::Intermediate, Level::Advanced];

    pub fn name(self) -> &'static str {
        match self {
            Level::Beginner => "beginner",
            Level::Intermediate => "intermediate",
            Level::Advanced => "advanced",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Level {
    type Err = ExplainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ExplainError::BadLevel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aspect {
    Chords,
    Rhythm,
    Embellishment,
}

impl Aspect {
    pub const ALL: [Aspect; 3] = [Aspect::Chords, Aspect::Rhythm, Aspect::Embellishment];

    pub fn title(self) -> &'static str {
        match self {
            Aspect::Chords => "Chords",
            Aspect::Rhythm => "Rhythm",
            Aspect::Embellishment => "Embellishment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub aspect: Aspect,
    /// Text with `[[term]]` / `[[term|shown]]` links.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationDoc {
    pub scope: Scope,
    pub level: Level,
    pub sections: Vec<Section>,
    pub terms: Vec<String>,
}

impl ExplanationDoc {
    pub fn section(&self, aspect: Aspect) -> Option<&Section> {
        self.sections.iter().find(|s| s.aspect == aspect)
    }

    pub fn plain_text(&self, glossary: &Glossary) -> String {
        self.sections.iter().map(|s| render_plain(&s.text, glossary)).collect::<Vec<_>>().join("\n")
    }
}

/// All linked term ids in the document, in order of first appearance.
pub fn extract_terms(doc: &ExplanationDoc) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in &doc.sections {
        for t in linked_terms(&s.text) {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// How a phrase closes, judged from its last two degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cadence {
    Authentic,
    Plagal,
    Half,
    Deceptive,
}

impl Cadence {
    pub fn name(self) -> &'static str {
        match self {
            Cadence::Authentic => "authentic",
            Cadence::Plagal => "plagal",
            Cadence::Half => "half",
            Cadence::Deceptive => "deceptive",
        }
    }

    pub fn article(self) -> &'static str {
        match self {
            Cadence::Authentic => "an",
            _ => "a",
        }
    }

    fn link(self) -> String {
        format!("{} [[{}|{}]]", self.article(), self.term(), self.name())
    }

    fn term(self) -> &'static str {
        match self {
            Cadence::Authentic => "authentic-cadence",
            Cadence::Plagal => "plagal-cadence",
            Cadence::Half => "half-cadence",
            Cadence::Deceptive => "deceptive-cadence",
        }
    }
}

pub fn cadence_of(progression: &[DegreeSymbol]) -> Option<Cadence> {
    let [.., prev, last] = progression else { return None };
    let natural = |d: &DegreeSymbol| !d.is_altered();
    match (natural(prev).then(|| prev.degree()), natural(last).then(|| last.degree())) {
        (Some(5), Some(1)) => Some(Cadence::Authentic),
        (Some(4), Some(1)) => Some(Cadence::Plagal),
        (Some(5), Some(6)) => Some(Cadence::Deceptive),
        (_, Some(5)) => Some(Cadence::Half),
        _ => None,
    }
}

/// Onset off the beat and held past the next beat.
pub fn is_syncopated(notes: &[LogicalNote]) -> bool {
    notes.iter().any(|n| !n.onset.is_integer() && n.onset + n.duration > n.onset.ceil())
}

pub fn is_offbeat_only(notes: &[LogicalNote]) -> bool {
    !notes.is_empty() && notes.iter().all(|n| !n.onset.is_integer())
}

pub fn has_triplets(notes: &[LogicalNote]) -> bool {
    notes.iter().any(|n| *n.onset.denom() % 3 == 0 || *n.duration.denom() % 3 == 0)
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn beats_text(b: Beats) -> String {
    if b <= Beats::from_integer(1) {
        format!("{b} beat")
    } else {
        format!("{b} beats")
    }
}

fn duration_name(d: Beats) -> (Option<&'static str>, String, String) {
    let n = (*d.numer(), *d.denom());
    match n {
        (4, 1) => (Some("whole-note"), "whole note".into(), "whole notes".into()),
        (3, 1) => (Some("half-note"), "dotted half note".into(), "dotted half notes".into()),
        (2, 1) => (Some("half-note"), "half note".into(), "half notes".into()),
        (3, 2) => (Some("quarter-note"), "dotted quarter note".into(), "dotted quarter notes".into()),
        (1, 1) => (Some("quarter-note"), "quarter note".into(), "quarter notes".into()),
        (3, 4) => (Some("eighth-note"), "dotted eighth note".into(), "dotted eighth notes".into()),
        (1, 2) => (Some("eighth-note"), "eighth note".into(), "eighth notes".into()),
        (1, 4) => (Some("sixteenth-note"), "sixteenth note".into(), "sixteenth notes".into()),
        (1, 3) => (Some("triplet"), "triplet eighth".into(), "triplet eighths".into()),
        _ => (None, format!("{d}-beat note"), format!("{d}-beat notes")),
    }
}

fn durations_text(notes: &[LogicalNote]) -> String {
    let mut groups: Vec<(Beats, usize)> = Vec::new();
    for n in notes {
        match groups.iter_mut().find(|(d, _)| *d == n.duration) {
            Some(g) => g.1 += 1,
            None => groups.push((n.duration, 1)),
        }
    }
    groups.sort_by_key(|g| std::cmp::Reverse(g.0));
    let parts: Vec<String> = groups
        .into_iter()
        .map(|(d, count)| {
            let (term, one, many) = duration_name(d);
            let word = if count == 1 { one } else { many };
            let word = match term {
                Some(t) => format!("[[{t}|{word}]]"),
                None => word,
            };
            let each = if count == 1 { beats_text(d) } else { format!("{} each", beats_text(d)) };
            format!("{count} {word} ({each})")
        })
        .collect();
    join_and(&parts)
}

fn tones_text(chord: ChordSymbol, key: Key) -> String {
    let names: Vec<String> = chord.triad().iter().map(|p| p.name(key.spelling()).to_string()).collect();
    join_and(&names)
}

fn function_link(f: HarmonicFunction) -> String {
    format!("[[{}]]", f.term())
}

fn spelled(p: Pitch, key: Key) -> String {
    p.spelled(key.spelling())
}

fn ornament_plural(kind: OrnamentKind, n: usize) -> String {
    let many = match kind {
        OrnamentKind::Appoggiatura => "appoggiaturas",
        OrnamentKind::Mordent => "mordents",
        OrnamentKind::Trill => "trills",
    };
    plural(n, kind.name(), many)
}

fn capitalized_article(kind: OrnamentKind) -> String {
    let article = if kind == OrnamentKind::Appoggiatura { "An" } else { "A" };
    format!("{article} {}", kind.name())
}

fn ornament_list(notes: &[LogicalNote]) -> String {
    let items: Vec<String> = OrnamentKind::ALL
        .iter()
        .filter_map(|&k| {
            let n = notes.iter().filter(|x| x.ornament.map(|o| o.0) == Some(k)).count();
            (n > 0).then(|| ornament_plural(k, n))
        })
        .collect();
    join_and(&items)
}

fn tone_distance(aux: Pitch, chord: ChordSymbol) -> u8 {
    chord.tones().iter().map(|t| aux.pitch_class().distance(*t)).min().unwrap_or(0)
}

struct Ctx<'a> {
    piece: &'a Piece,
    db: &'a CorpusDb,
    templates: &'a Templates,
    level: Level,
    scope: &'static str,
}

impl Ctx<'_> {
    fn t(&self, key: &str, slots: &[(&str, String)]) -> String {
        fill(self.templates.get(self.scope, self.level.name(), key), slots)
    }

    fn t_at(&self, level: Level, key: &str, slots: &[(&str, String)]) -> String {
        fill(self.templates.get(self.scope, level.name(), key), slots)
    }

    fn key(&self) -> Key {
        self.piece.key()
    }

    fn chord_name(&self, c: ChordSymbol) -> String {
        c.name(self.key().spelling())
    }

    fn style(&self, id: u8) -> String {
        self.db.rhythm(id).map(|r| r.style.clone()).unwrap_or_else(|| "custom".into())
    }
}

fn rh_measure(piece: &Piece, i: usize) -> &Measure {
    &piece.score.part(Hand::RightHand).expect("melody part").measures[i]
}

fn lh_sounds(piece: &Piece, i: usize) -> bool {
    piece.score.part(Hand::LeftHand).and_then(|p| p.measures.get(i)).map(|m| m.has_sound()).unwrap_or(false)
}

fn phrase_notes(piece: &Piece, phrase: &Phrase) -> Vec<LogicalNote> {
    phrase.measures().flat_map(|i| logical_notes(rh_measure(piece, i))).collect()
}

/// Builds the explanation for `scope` at `level` from the piece's stored analysis.
pub fn explain(piece: &Piece, db: &CorpusDb, scope: Scope, level: Level) -> Result<ExplanationDoc, ExplainError> {
    let templates = Templates::builtin();
    let sections = match scope {
        Scope::Measure(i) => {
            let info = piece.measure_info(i).map_err(|_| ExplainError::ScopeOutOfRange(scope))?;
            let ctx = Ctx { piece, db, templates, level, scope: "measure" };
            explain_measure(&ctx, &info)
        }
        Scope::Phrase(j) => {
            let phrase = piece.phrases().get(j).ok_or(ExplainError::ScopeOutOfRange(scope))?;
            let ctx = Ctx { piece, db, templates, level, scope: "phrase" };
            explain_phrase(&ctx, phrase)
        }
        Scope::Piece => {
            let ctx = Ctx { piece, db, templates, level, scope: "piece" };
            explain_piece(&ctx)
        }
    };
    let mut doc = ExplanationDoc {
        scope,
        level,
        sections: Aspect::ALL.iter().zip(sections).map(|(&aspect, text)| Section { aspect, text }).collect(),
        terms: Vec::new(),
    };
    doc.terms = extract_terms(&doc);
    Ok(doc)
}

fn sentences(parts: Vec<String>) -> String {
    parts.into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ")
}

fn explain_measure(ctx: &Ctx, info: &MeasureInfo) -> [String; 3] {
    let piece = ctx.piece;
    let key = ctx.key();
    let m = rh_measure(piece, info.index);
    let notes = logical_notes(m);
    let is_input = info.source == MeasureSource::Input;
    let phrase = info.phrase.map(|j| &piece.phrases()[j]);
    let key_name = key.to_string();

    // chords
    let mut chords = Vec::new();
    let chord_slots = |c: ChordSymbol| -> Vec<(&str, String)> {
        vec![
            ("chord", ctx.chord_name(c)),
            ("tones", tones_text(c, key)),
            ("key", key_name.clone()),
            ("degree", info.degree.map(|d| d.to_string()).unwrap_or_default()),
            ("function", info.degree.map(|d| function_link(d.function())).unwrap_or_default()),
        ]
    };
    match (ctx.level, info.chord) {
        (_, None) => {
            let level = if ctx.level == Level::Beginner { Level::Beginner } else { Level::Intermediate };
            chords.push(ctx.t_at(level, "no_chord", &[("key", key_name.clone())]));
        }
        (Level::Beginner, Some(c)) => {
            if info.is_ending {
                chords.push(ctx.t("ending_chord", &chord_slots(c)));
            } else if is_input {
                chords.push(ctx.t("input_chord", &chord_slots(c)));
            } else {
                chords.push(ctx.t("chord", &chord_slots(c)));
                if c.quality.is_seventh() {
                    let seventh = c.tones()[3].name(key.spelling()).to_string();
                    chords.push(ctx.t("chord_seventh", &[("seventh", seventh)]));
                }
            }
        }
        (Level::Intermediate, Some(c)) => {
            if info.is_ending {
                chords.push(ctx.t("ending_chord", &chord_slots(c)));
            } else if is_input {
                chords.push(ctx.t("input_chord", &chord_slots(c)));
            } else {
                chords.push(ctx.t("chord", &chord_slots(c)));
                let (p, k) = (phrase.expect("generated"), info.position.expect("generated"));
                if p.substituted[k] {
                    let original = p.original[k];
                    let shared = c.common_tones(crate::theory::degree_to_chord(original, key));
                    chords.push(ctx.t("substituted", &[("original", original.to_string()), ("shared", shared.to_string())]));
                }
                if p.edited[k] {
                    chords.push(ctx.t("edited", &[]));
                }
            }
        }
        (Level::Advanced, Some(c)) => {
            if info.is_ending {
                chords.push(ctx.t("ending_chord", &[]));
            } else if is_input {
                let total: Beats = m.weighted_pitch_classes().map(|(_, d)| d).sum();
                let inside: Beats = m.weighted_pitch_classes().filter(|(pc, _)| c.contains(*pc)).map(|(_, d)| d).sum();
                let pct = if total.is_zero() { 0 } else { (inside * 100 / total).round().to_integer() };
                chords.push(ctx.t("input_chord", &[("chord", ctx.chord_name(c)), ("coverage", format!("{pct}%"))]));
            } else {
                let (p, k) = (phrase.expect("generated"), info.position.expect("generated"));
                chords.push(ctx.t(
                    "position",
                    &[
                        ("position", (k + 1).to_string()),
                        ("length", p.progression.len().to_string()),
                        ("progression", crate::theory::progression_string(&p.progression)),
                    ],
                ));
                let f = p.progression[k].function();
                if f == HarmonicFunction::Dominant {
                    chords.push(ctx.t("tension", &[]));
                    if let Some(next) = p.progression.get(k + 1) {
                        let key_slot = if next.function() == HarmonicFunction::Tonic { "resolves" } else { "unresolved" };
                        chords.push(ctx.t(key_slot, &[]));
                    }
                } else {
                    let stability = if f == HarmonicFunction::Tonic { "at rest" } else { "a step away from home" };
                    chords.push(ctx.t(
                        "stable",
                        &[("function", function_link(f)), ("stability", stability.into()), ("key", key_name.clone())],
                    ));
                }
                if k + 1 == p.progression.len() {
                    if let Some(cad) = cadence_of(&p.progression) {
                        chords.push(ctx.t("closes", &[("cadence", cad.link())]));
                    }
                }
            }
        }
    }

    // rhythm
    let mut rhythm = Vec::new();
    let rest_total: Beats = m.events.iter().filter(|e| e.is_rest()).map(|e| e.duration).sum();
    match ctx.level {
        Level::Beginner => {
            if notes.is_empty() {
                rhythm.push(ctx.t("rhythm_silent", &[]));
            } else {
                rhythm.push(ctx.t("rhythm", &[("durations", durations_text(&notes))]));
                if !rest_total.is_zero() {
                    rhythm.push(ctx.t("rhythm_rests", &[("rest_beats", beats_text(rest_total))]));
                }
            }
            if lh_sounds(piece, info.index) {
                rhythm.push(ctx.t("rhythm_left", &[]));
            }
        }
        Level::Intermediate => {
            if info.is_ending {
                rhythm.push(ctx.t("ending_rhythm", &[]));
            } else if is_input {
                if info.index == 0 {
                    rhythm.push(ctx.t(
                        "input_rhythm_fitted",
                        &[
                            ("pattern", piece.analysis.fitted_rhythm.to_string()),
                            ("distance", piece.analysis.fitted_distance.to_string()),
                        ],
                    ));
                } else {
                    rhythm.push(ctx.t("input_rhythm", &[("notes", notes.len().to_string())]));
                }
            } else {
                let id = info.rhythm.expect("generated measures have a pattern");
                rhythm.push(ctx.t("rhythm", &[("pattern", id.to_string()), ("style", ctx.style(id))]));
                let fitted = piece.generation.fitted_rhythm;
                if info.position == Some(0) && id == fitted {
                    rhythm.push(ctx.t("rhythm_first", &[("fitted", fitted.to_string())]));
                } else if info.position == Some(0) {
                    rhythm.push(ctx.t("rhythm_edited_pattern", &[]));
                } else {
                    rhythm.push(ctx.t("rhythm_later", &[]));
                }
            }
        }
        Level::Advanced => {
            if notes.is_empty() {
                rhythm.push(ctx.t("rhythm_silent", &[]));
            } else {
                let mut any = false;
                if is_syncopated(&notes) {
                    rhythm.push(ctx.t("syncopated", &[]));
                    any = true;
                }
                if is_offbeat_only(&notes) {
                    rhythm.push(ctx.t("offbeat", &[]));
                    any = true;
                }
                if has_triplets(&notes) {
                    rhythm.push(ctx.t("triplets", &[]));
                    any = true;
                }
                if !any {
                    rhythm.push(ctx.t("square", &[]));
                }
            }
        }
    }

    // embellishment
    let mut orn = Vec::new();
    let ornamented: Vec<&LogicalNote> = notes.iter().filter(|n| n.ornament.is_some()).collect();
    match ctx.level {
        Level::Beginner | Level::Intermediate if is_input => orn.push(ctx.t("ornament_input", &[])),
        Level::Beginner | Level::Intermediate if ornamented.is_empty() => orn.push(ctx.t("ornament_none", &[])),
        Level::Beginner => {
            for n in &ornamented {
                let (kind, aux) = n.ornament.expect("filtered");
                let key_name = format!("ornament_{}", kind.name());
                orn.push(ctx.t(&key_name, &[("main", spelled(n.pitch, key)), ("aux", spelled(aux, key))]));
            }
        }
        Level::Intermediate => {
            let chord = info.chord.expect("generated measures have chords");
            for n in &ornamented {
                let (kind, aux) = n.ornament.expect("filtered");
                orn.push(ctx.t(
                    "ornament_item",
                    &[
                        ("kind", capitalized_article(kind)),
                        ("main", spelled(n.pitch, key)),
                        ("aux", spelled(aux, key)),
                        ("distance", plural(tone_distance(aux, chord) as usize, "semitone", "semitones")),
                    ],
                ));
            }
        }
        Level::Advanced => {
            if ornamented.is_empty() {
                orn.push(ctx.t("ornament_none", &[("notes", notes.len().to_string())]));
            } else {
                orn.push(ctx.t(
                    "ornament_count",
                    &[("ornamented", ornamented.len().to_string()), ("notes", notes.len().to_string())],
                ));
                for n in &ornamented {
                    let (kind, _) = n.ornament.expect("filtered");
                    let pieces = m
                        .events
                        .iter()
                        .filter(|e| e.onset >= n.onset && e.onset < n.onset + n.duration && e.ornament.is_some())
                        .count();
                    orn.push(ctx.t(
                        "ornament_timing",
                        &[
                            ("kind", kind.name().to_string()),
                            ("main", spelled(n.pitch, key)),
                            ("length", beats_text(n.duration)),
                            ("pieces", pieces.to_string()),
                        ],
                    ));
                }
            }
        }
    }
    // keep the ornament choice rule honest: the stored kind is what the rule picks
    debug_assert!(ornamented.iter().all(|n| {
        let (kind, _) = n.ornament.unwrap();
        info.chord.map(|c| choose_ornament(n.pitch, n.duration, c, key).0 == kind).unwrap_or(true)
    }));

    [sentences(chords), sentences(rhythm), sentences(orn)]
}

fn explain_phrase(ctx: &Ctx, phrase: &Phrase) -> [String; 3] {
    let piece = ctx.piece;
    let key = ctx.key();
    let notes = phrase_notes(piece, phrase);
    let ornamented = notes.iter().filter(|n| n.ornament.is_some()).count();
    let progression = crate::theory::progression_string(&phrase.progression);

    let chords = match ctx.level {
        Level::Beginner => {
            let list: Vec<String> = phrase.chords.iter().map(|c| ctx.chord_name(*c)).collect();
            ctx.t("chords", &[("chord_list", list.join(", "))])
        }
        Level::Intermediate => {
            let functions: Vec<String> = phrase.progression.iter().map(|d| function_link(d.function())).collect();
            let mut s = vec![
                ctx.t(
                    "chords",
                    &[("progression", progression.clone()), ("key", key.to_string()), ("functions", join_and(&functions))],
                ),
                ctx.t(
                    "source",
                    &[
                        ("category", phrase.category.name().to_string()),
                        ("similarity", format!("{}/{}", phrase.similarity[0], phrase.similarity[1])),
                    ],
                ),
            ];
            let subs = phrase.substituted.iter().filter(|&&b| b).count();
            if subs > 0 {
                let text = if subs == 1 { "1 chord was".to_string() } else { format!("{subs} chords were") };
                s.push(ctx.t("substituted", &[("count_chords", text)]));
            }
            let edits = phrase.edited.iter().filter(|&&b| b).count();
            if edits > 0 {
                let text = if edits == 1 { "1 measure was".to_string() } else { format!("{edits} measures were") };
                s.push(ctx.t("edited", &[("count_measures", text)]));
            }
            sentences(s)
        }
        Level::Advanced => {
            let mut s = Vec::new();
            match cadence_of(&phrase.progression) {
                Some(c) => s.push(ctx.t("cadence", &[("cadence", c.link())])),
                None => {
                    let [.., a, b] = &phrase.progression[..] else { unreachable!("phrases have several chords") };
                    s.push(ctx.t("no_cadence", &[("last_two", format!("moving from {a} to {b}"))]));
                }
            }
            let dominants: Vec<usize> = (0..phrase.progression.len())
                .filter(|&k| phrase.progression[k].function() == HarmonicFunction::Dominant)
                .collect();
            if dominants.is_empty() {
                s.push(ctx.t("no_tension", &[]));
            } else {
                let resolved = dominants
                    .iter()
                    .filter(|&&k| phrase.progression.get(k + 1).map(|d| d.function()) == Some(HarmonicFunction::Tonic))
                    .count();
                s.push(ctx.t(
                    "tension",
                    &[("dominants", dominants.len().to_string()), ("resolved", resolved.to_string())],
                ));
            }
            sentences(s)
        }
    };

    let rhythm = match ctx.level {
        Level::Beginner => ctx.t("rhythm", &[]),
        Level::Intermediate => {
            let list: Vec<String> = phrase.rhythm_plan.iter().map(|id| format!("pattern {id}")).collect();
            ctx.t("rhythm", &[("pattern_list", join_and(&list))])
        }
        Level::Advanced => {
            let per: Vec<Vec<LogicalNote>> = phrase.measures().map(|i| logical_notes(rh_measure(piece, i))).collect();
            ctx.t(
                "rhythm",
                &[
                    ("syncopated", per.iter().filter(|n| is_syncopated(n)).count().to_string()),
                    ("measures", per.len().to_string()),
                    ("triplet", per.iter().filter(|n| has_triplets(n)).count().to_string()),
                ],
            )
        }
    };

    let orn = match ctx.level {
        Level::Beginner if ornamented == 0 => ctx.t("ornament_none", &[]),
        Level::Beginner => ctx.t("ornament_some", &[("ornamented_notes", plural(ornamented, "note", "notes"))]),
        Level::Intermediate if ornamented == 0 => ctx.t("ornament_none", &[]),
        Level::Intermediate => ctx.t("ornament_some", &[("ornament_list", ornament_list(&notes))]),
        Level::Advanced => ctx.t(
            "ornament_count",
            &[("ornamented", ornamented.to_string()), ("notes", notes.len().to_string())],
        ),
    };
    [chords, rhythm, orn]
}

fn explain_piece(ctx: &Ctx) -> [String; 3] {
    let piece = ctx.piece;
    let key = ctx.key();
    let phrases = piece.phrases();
    let measures = piece.measure_count();
    let all_notes: Vec<LogicalNote> = (0..measures).flat_map(|i| logical_notes(rh_measure(piece, i))).collect();
    let ornamented = all_notes.iter().filter(|n| n.ornament.is_some()).count();

    let chords = match ctx.level {
        Level::Beginner => sentences(vec![
            ctx.t(
                "chords",
                &[
                    ("key", key.to_string()),
                    ("phrases", plural(phrases.len(), "generated phrase", "generated phrases")),
                ],
            ),
            ctx.t(if piece.ended { "ended" } else { "open" }, &[]),
        ]),
        Level::Intermediate => {
            let input = piece.analysis.input_progression();
            let mut s = vec![if input.is_empty() {
                ctx.t("no_input_progression", &[("key", key.to_string())])
            } else {
                ctx.t(
                    "chords",
                    &[("input_progression", crate::theory::progression_string(&input)), ("key", key.to_string())],
                )
            }];
            for (j, p) in phrases.iter().enumerate() {
                s.push(ctx.t(
                    "phrase",
                    &[
                        ("number", (j + 1).to_string()),
                        ("progression", crate::theory::progression_string(&p.progression)),
                    ],
                ));
            }
            sentences(s)
        }
        Level::Advanced => {
            let first = if phrases.is_empty() {
                let ending = if piece.ended { " and the closing tonic measure" } else { "" };
                ctx.t("no_phrases", &[("ending", ending.into())])
            } else {
                let list: Vec<String> = phrases
                    .iter()
                    .enumerate()
                    .map(|(j, p)| match cadence_of(&p.progression) {
                        Some(c) => format!("phrase {} has {} {} cadence", j + 1, c.article(), c.name()),
                        None => format!("phrase {} has no standard close", j + 1),
                    })
                    .collect();
                ctx.t("cadences", &[("cadence_list", list.join("; "))])
            };
            sentences(vec![first, ctx.t("unused", &[])])
        }
    };

    let rhythm = match ctx.level {
        Level::Beginner => ctx.t("rhythm", &[("bpm", piece.score.bpm.to_string()), ("measures", measures.to_string())]),
        Level::Intermediate => ctx.t("rhythm", &[("pattern", piece.generation.fitted_rhythm.to_string())]),
        Level::Advanced => {
            let synco = (0..measures).filter(|&i| is_syncopated(&logical_notes(rh_measure(piece, i)))).count();
            ctx.t("rhythm", &[("syncopated", synco.to_string()), ("measures", measures.to_string())])
        }
    };

    let orn = match ctx.level {
        Level::Beginner if ornamented == 0 => ctx.t("ornament_none", &[]),
        Level::Beginner => ctx.t("ornament_some", &[("ornamented_notes", plural(ornamented, "note", "notes"))]),
        Level::Intermediate if ornamented == 0 => ctx.t("ornament_none", &[]),
        Level::Intermediate => ctx.t("ornament_some", &[("ornament_list", ornament_list(&all_notes))]),
        Level::Advanced => ctx.t(
            "ornament_count",
            &[("ornamented", ornamented.to_string()), ("notes", all_notes.len().to_string())],
        ),
    };
    [chords, rhythm, orn]
}
