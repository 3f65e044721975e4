use std::fmt::Write;

use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::{render_markdown, Aspect, Glossary, Level, Scope};
use cadenza_service::doc::{AnalysisDoc, PhraseDoc};
use cadenza_service::{ServiceError, Session};

fn opt_list(items: &[Option<String>]) -> String {
    items.iter().map(|x| x.as_deref().unwrap_or("-")).collect::<Vec<_>>().join(" ")
}

/// Human summary of the analysis, as printed by `analyze`.
pub fn analysis_text(a: &AnalysisDoc) -> String {
    let mut s = String::new();
    writeln!(s, "Key: {}; Degrees: {}", a.key, opt_list(&a.degrees)).unwrap();
    writeln!(s, "Chords: {}", opt_list(&a.chords)).unwrap();
    writeln!(s, "Fitted rhythm: {} (distance {})", a.fitted_rhythm, a.fitted_distance).unwrap();
    writeln!(s, "Tempo: {} bpm; Measures: {}", a.bpm, a.measures).unwrap();
    if a.ambiguous {
        let runner = a.key_candidates.get(1).map_or("", |c| c.key.as_str());
        writeln!(s, "Key is ambiguous; runner-up: {runner}").unwrap();
    }
    s
}

fn section_block(out: &mut String, session: &Session, scope: Scope, level: Level, db: &CorpusDb) -> Result<(), ServiceError> {
    let doc = session.explanation(scope, level, db)?;
    let glossary = Glossary::builtin();
    for aspect in Aspect::ALL {
        if let Some(sec) = doc.section(aspect) {
            writeln!(out, "### {}\n\n{}\n", aspect.title(), render_markdown(&sec.text, glossary)).unwrap();
        }
    }
    Ok(())
}

/// Markdown report: analysis, then every phrase and the whole piece at `level`.
pub fn markdown(
    input_name: &str,
    seed: u64,
    level: Level,
    analysis: &AnalysisDoc,
    phrases: &[PhraseDoc],
    session: &Session,
    db: &CorpusDb,
) -> Result<String, ServiceError> {
    let score = session.score()?;
    let mut out = String::new();
    writeln!(out, "# Cadenza report\n").unwrap();
    writeln!(out, "Input `{input_name}`, seed {seed}, level {}.\n", level.name()).unwrap();
    writeln!(out, "## Analysis\n").unwrap();
    writeln!(out, "- Key: {}", analysis.key).unwrap();
    writeln!(out, "- Chords: {}", opt_list(&analysis.chords)).unwrap();
    writeln!(out, "- Degrees: {}", opt_list(&analysis.degrees)).unwrap();
    writeln!(out, "- Fitted rhythm: {}", analysis.fitted_rhythm).unwrap();
    writeln!(out, "- Tempo: {} bpm", analysis.bpm).unwrap();
    writeln!(out, "- Measures: {} input, {} total\n", score.input_measures, score.measure_count).unwrap();
    for w in &analysis.warnings {
        writeln!(out, "> {w}\n").unwrap();
    }
    for p in phrases {
        let first = p.first_measure + 1;
        writeln!(out, "## Phrase {}: measures {} to {}\n", p.index + 1, first, first + p.length - 1).unwrap();
        writeln!(out, "Progression {} ({}), from corpus entry `{}`.\n", p.progression, p.chords.join(" "), p.entry_id).unwrap();
        section_block(&mut out, session, Scope::Phrase(p.index), level, db)?;
    }
    writeln!(out, "## Whole piece\n").unwrap();
    section_block(&mut out, session, Scope::Piece, level, db)?;
    Ok(out)
}
