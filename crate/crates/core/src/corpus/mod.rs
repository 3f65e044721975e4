//! The progression and rhythm database: loading, validation and queries.

mod rhythm;
mod similarity;

pub use rhythm::{fit_rhythm, rasterize_measure, rasterize_pattern, Slot, SLOTS_PER_MEASURE};
pub use similarity::{longest_match, matching_blocks, similarity_ratio, MatchBlock};

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::theory::{measure_length, parse_beats, Beats, DegreeSymbol, Mode};

pub const DEFAULT_PROGRESSIONS: &str = include_str!("../../data/progressions.txt");
pub const DEFAULT_RHYTHMS: &str = include_str!("../../data/rhythms.txt");

pub const PROGRESSION_COUNT: usize = 39;
pub const RHYTHM_COUNT: usize = 16;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}:{column}: {message}")]
    Parse { file: String, line: usize, column: usize, message: String },
    #[error("{what}: expected {expected}, found {found}")]
    CountMismatch { what: String, expected: usize, found: usize },
    #[error("rhythm pattern {id} lasts {total} beats, not 4")]
    DurationMismatch { id: u8, total: String },
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Classic,
    Extended,
    Diminished,
    Aug4,
    Mixed,
    Substitute,
    Cycle,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Classic,
        Category::Extended,
        Category::Diminished,
        Category::Aug4,
        Category::Mixed,
        Category::Substitute,
        Category::Cycle,
    ];

    pub fn expected_count(self) -> usize {
        match self {
            Category::Classic | Category::Extended => 9,
            Category::Mixed => 5,
            _ => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Classic => "classic",
            Category::Extended => "extended",
            Category::Diminished => "diminished",
            Category::Aug4 => "aug4",
            Category::Mixed => "mixed",
            Category::Substitute => "substitute",
            Category::Cycle => "cycle",
        }
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}

/// Which keys an entry is offered in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMode {
    Major,
    Minor,
    Both,
}

impl EntryMode {
    pub fn admits(self, mode: Mode) -> bool {
        matches!((self, mode), (EntryMode::Both, _) | (EntryMode::Major, Mode::Major) | (EntryMode::Minor, Mode::Minor))
    }

    fn name(self) -> &'static str {
        match self {
            EntryMode::Major => "major",
            EntryMode::Minor => "minor",
            EntryMode::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionEntry {
    pub id: String,
    pub category: Category,
    pub mode: EntryMode,
    pub degrees: Vec<DegreeSymbol>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Note,
    Rest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhythmEvent {
    #[serde(with = "crate::theory::score::beats_serde")]
    pub duration: Beats,
    pub kind: SlotKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhythmPattern {
    pub id: u8,
    pub style: String,
    pub events: Vec<RhythmEvent>,
}

impl RhythmPattern {
    pub fn total(&self) -> Beats {
        self.events.iter().map(|e| e.duration).sum()
    }

    /// `(onset, duration, kind)` for each slot.
    pub fn timeline(&self) -> Vec<(Beats, Beats, SlotKind)> {
        let mut onset = Beats::from_integer(0);
        self.events
            .iter()
            .map(|e| {
                let slot = (onset, e.duration, e.kind);
                onset += e.duration;
                slot
            })
            .collect()
    }

    pub fn note_count(&self) -> usize {
        self.events.iter().filter(|e| e.kind == SlotKind::Note).count()
    }
}

impl fmt::Display for RhythmPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {} | ", self.id, self.style)?;
        for e in &self.events {
            let d = e.duration;
            let kind = match e.kind {
                SlotKind::Note => "note",
                SlotKind::Rest => "rest",
            };
            write!(f, "({d} {kind})")?;
        }
        Ok(())
    }
}

impl fmt::Display for ProgressionEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degrees: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        write!(f, "{} | {} | {} | {}", self.id, self.category.name(), self.mode.name(), degrees.join(" "))
    }
}

/// The loaded, validated database. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDb {
    pub progressions: Vec<ProgressionEntry>,
    pub rhythms: Vec<RhythmPattern>,
    /// Hex SHA-256 over both source texts.
    pub source_digest: String,
}

fn parse_error(file: &str, line: usize, column: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse { file: file.to_string(), line, column, message: message.into() }
}

/// Content lines with their 1-based line numbers; `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        (!line.trim().is_empty()).then_some((i + 1, line))
    })
}

/// Splits `a | b | c` and returns each field with its 1-based column.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in line.split('|') {
        let lead = piece.len() - piece.trim_start().len();
        out.push((start + lead + 1, piece.trim()));
        start += piece.len() + 1;
    }
    out
}

pub fn parse_progressions(text: &str, file: &str) -> Result<Vec<ProgressionEntry>, CorpusError> {
    let mut entries = Vec::new();
    for (line_no, line) in content_lines(text) {
        let f = fields(line);
        if f.len() != 4 {
            return Err(parse_error(file, line_no, 1, format!("expected 4 fields, found {}", f.len())));
        }
        let (id_col, id) = f[0];
        if id.is_empty() {
            return Err(parse_error(file, line_no, id_col, "empty id"));
        }
        let category = f[1].1.parse().map_err(|m| parse_error(file, line_no, f[1].0, m))?;
        let mode = match f[2].1 {
            "major" => EntryMode::Major,
            "minor" => EntryMode::Minor,
            "both" => EntryMode::Both,
            other => return Err(parse_error(file, line_no, f[2].0, format!("unknown mode {other:?}"))),
        };
        let (deg_col, deg_text) = f[3];
        let mut degrees = Vec::new();
        let mut offset = 0;
        for token in deg_text.split_whitespace() {
            let at = deg_text[offset..].find(token).unwrap_or(0) + offset;
            offset = at + token.len();
            let d = token
                .parse::<DegreeSymbol>()
                .map_err(|e| parse_error(file, line_no, deg_col + at, e.to_string()))?;
            degrees.push(d);
        }
        if degrees.len() < 3 {
            return Err(parse_error(file, line_no, deg_col, "a progression needs at least 3 chords"));
        }
        entries.push(ProgressionEntry { id: id.to_string(), category, mode, degrees });
    }
    Ok(entries)
}

pub fn parse_rhythms(text: &str, file: &str) -> Result<Vec<RhythmPattern>, CorpusError> {
    let mut patterns = Vec::new();
    for (line_no, line) in content_lines(text) {
        let f = fields(line);
        if f.len() != 3 {
            return Err(parse_error(file, line_no, 1, format!("expected 3 fields, found {}", f.len())));
        }
        let id: u8 = f[0].1.parse().map_err(|_| parse_error(file, line_no, f[0].0, "id must be an integer"))?;
        let style = f[1].1.to_string();
        let (col, body) = f[2];
        let mut events = Vec::new();
        let mut rest = body;
        while !rest.trim().is_empty() {
            let at = col + (body.len() - rest.len());
            let open = rest.trim_start();
            let inner_start = open
                .strip_prefix('(')
                .ok_or_else(|| parse_error(file, line_no, at, "expected '('"))?;
            let close = inner_start
                .find(')')
                .ok_or_else(|| parse_error(file, line_no, at, "unclosed '('"))?;
            let inner = &inner_start[..close];
            let mut parts = inner.split_whitespace();
            let dur = parts
                .next()
                .and_then(parse_beats)
                .filter(|d| *d > Beats::from_integer(0))
                .ok_or_else(|| parse_error(file, line_no, at, format!("bad duration in ({inner})")))?;
            let kind = match parts.next() {
                Some("note") => SlotKind::Note,
                Some("rest") => SlotKind::Rest,
                _ => return Err(parse_error(file, line_no, at, format!("bad kind in ({inner})"))),
            };
            if parts.next().is_some() {
                return Err(parse_error(file, line_no, at, format!("trailing input in ({inner})")));
            }
            events.push(RhythmEvent { duration: dur, kind });
            rest = &inner_start[close + 1..];
        }
        if events.is_empty() {
            return Err(parse_error(file, line_no, col, "empty pattern"));
        }
        patterns.push(RhythmPattern { id, style, events });
    }
    Ok(patterns)
}

impl CorpusDb {
    /// Parses and validates both texts.
    pub fn from_texts(progressions: &str, rhythms: &str) -> Result<Self, CorpusError> {
        let progression_entries = parse_progressions(progressions, "progressions")?;
        let rhythm_patterns = parse_rhythms(rhythms, "rhythms")?;

        let mut seen = HashSet::new();
        for p in &progression_entries {
            if !seen.insert(p.id.clone()) {
                return Err(CorpusError::DuplicateId(p.id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for r in &rhythm_patterns {
            if !seen.insert(r.id) {
                return Err(CorpusError::DuplicateId(r.id.to_string()));
            }
            if r.total() != measure_length() {
                return Err(CorpusError::DurationMismatch { id: r.id, total: r.total().to_string() });
            }
        }
        if progression_entries.len() != PROGRESSION_COUNT {
            return Err(CorpusError::CountMismatch {
                what: "progressions".into(),
                expected: PROGRESSION_COUNT,
                found: progression_entries.len(),
            });
        }
        for cat in Category::ALL {
            let found = progression_entries.iter().filter(|p| p.category == cat).count();
            if found != cat.expected_count() {
                return Err(CorpusError::CountMismatch {
                    what: format!("{} progressions", cat.name()),
                    expected: cat.expected_count(),
                    found,
                });
            }
        }
        if rhythm_patterns.len() != RHYTHM_COUNT {
            return Err(CorpusError::CountMismatch {
                what: "rhythm patterns".into(),
                expected: RHYTHM_COUNT,
                found: rhythm_patterns.len(),
            });
        }
        let mut ids: Vec<u8> = rhythm_patterns.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        if ids != (1..=RHYTHM_COUNT as u8).collect::<Vec<_>>() {
            return Err(CorpusError::CountMismatch {
                what: "rhythm ids 1..=16".into(),
                expected: RHYTHM_COUNT,
                found: ids.iter().filter(|&&i| (1..=16).contains(&i)).count(),
            });
        }

        let mut hasher = Sha256::new();
        hasher.update(progressions.as_bytes());
        hasher.update([0u8]);
        hasher.update(rhythms.as_bytes());
        let source_digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();

        let mut rhythms_sorted = rhythm_patterns;
        rhythms_sorted.sort_by_key(|r| r.id);
        Ok(CorpusDb { progressions: progression_entries, rhythms: rhythms_sorted, source_digest })
    }

    /// The database shipped with the crate.
    pub fn builtin() -> Self {
        CorpusDb::from_texts(DEFAULT_PROGRESSIONS, DEFAULT_RHYTHMS).expect("shipped corpus is valid")
    }

    pub fn rhythm(&self, id: u8) -> Option<&RhythmPattern> {
        self.rhythms.iter().find(|r| r.id == id)
    }

    pub fn progression(&self, id: &str) -> Option<&ProgressionEntry> {
        self.progressions.iter().find(|p| p.id == id)
    }

    /// Serializes the progressions back to the line format.
    pub fn progressions_text(&self) -> String {
        self.progressions.iter().map(|p| format!("{p}\n")).collect()
    }

    pub fn rhythms_text(&self) -> String {
        self.rhythms.iter().map(|r| format!("{r}\n")).collect()
    }
}

/// Reads and validates the two corpus files.
pub fn load_corpus(progression_file: &Path, rhythm_file: &Path) -> Result<CorpusDb, CorpusError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| CorpusError::Io { path: p.display().to_string(), source })
    };
    CorpusDb::from_texts(&read(progression_file)?, &read(rhythm_file)?)
}

/// Loads `progressions.txt` and `rhythms.txt` from `dir`.
pub fn load_corpus_dir(dir: &Path) -> Result<CorpusDb, CorpusError> {
    load_corpus(&dir.join("progressions.txt"), &dir.join("rhythms.txt"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedProgression<'a> {
    pub entry: &'a ProgressionEntry,
    pub ratio: Ratio<u64>,
}

/// Scores every entry admitted by `mode` against `input` and sorts best-first.
///
/// Ties go to the earlier category (classic first), then to the smaller id.
pub fn rank_progressions<'a>(input: &[DegreeSymbol], db: &'a CorpusDb, mode: Mode) -> Vec<RankedProgression<'a>> {
    let mut ranked: Vec<RankedProgression<'a>> = db
        .progressions
        .iter()
        .filter(|e| e.mode.admits(mode))
        .map(|entry| RankedProgression { entry, ratio: similarity_ratio(input, &entry.degrees) })
        .collect();
    ranked.sort_by(|a, b| {
        b.ratio
            .cmp(&a.ratio)
            .then(a.entry.category.cmp(&b.entry.category))
            .then(a.entry.id.cmp(&b.entry.id))
    });
    ranked
}
