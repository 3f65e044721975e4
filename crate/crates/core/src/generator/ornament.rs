use num_traits::Zero;

use super::voicing::scale_step;
use super::Rng;
use crate::theory::{
    beats, is_on_grid, Beats, ChordSymbol, EventKind, Key, Measure, NoteEvent, OrnamentKind, OrnamentTag, Pitch,
};

/// round(rate × n) with halves rounding up.
pub fn ornament_count(rate: f64, n: usize) -> usize {
    ((rate * n as f64) + 0.5 + 1e-9).floor() as usize
}

fn tone_distance(aux: Pitch, chord: ChordSymbol) -> u8 {
    chord.tones().iter().map(|t| aux.pitch_class().distance(*t)).min().unwrap_or(0)
}

/// The ornament for a note of `duration`, with its auxiliary pitch.
///
/// Notes shorter than a beat lean from the upper neighbour (appoggiatura),
/// longer ones trill with it; a mordent to the lower neighbour competes when
/// its eighth-length pieces fit the grid. The neighbour nearer a chord tone
/// wins, ties resolving appoggiatura > mordent > trill.
pub fn choose_ornament(pitch: Pitch, duration: Beats, chord: ChordSymbol, key: Key) -> (OrnamentKind, Pitch) {
    let midi = pitch.midi() as i32;
    let upper = Pitch::from_i32(scale_step(midi, true, key).min(127)).expect("clamped");
    let lower = Pitch::from_i32(scale_step(midi, false, key).max(0)).expect("clamped");
    let upper_kind = if duration >= Beats::from_integer(1) { OrnamentKind::Trill } else { OrnamentKind::Appoggiatura };
    let mordent_fits = is_on_grid(duration / 8);
    if !mordent_fits {
        return (upper_kind, upper);
    }
    let (du, dl) = (tone_distance(upper, chord), tone_distance(lower, chord));
    let upper_wins = du < dl || (du == dl && upper_kind == OrnamentKind::Appoggiatura);
    if upper_wins {
        (upper_kind, upper)
    } else {
        (OrnamentKind::Mordent, lower)
    }
}

/// Literal events for one ornamented note; they fill exactly its time span.
pub fn realize_ornament(main: Pitch, onset: Beats, duration: Beats, kind: OrnamentKind, aux: Pitch) -> Vec<NoteEvent> {
    let pieces: Vec<(Pitch, Beats)> = match kind {
        OrnamentKind::Appoggiatura => vec![(aux, duration / 2), (main, duration / 2)],
        OrnamentKind::Mordent => {
            let e = duration / 8;
            vec![(main, e), (aux, e), (main, duration - e * 2)]
        }
        OrnamentKind::Trill => {
            let slice = beats(1, 4);
            let mut out = Vec::new();
            let mut used = Beats::zero();
            let mut on_main = true;
            while used < duration {
                let d = slice.min(duration - used);
                out.push((if on_main { main } else { aux }, d));
                used += d;
                on_main = !on_main;
            }
            out
        }
    };
    let mut t = onset;
    pieces
        .into_iter()
        .enumerate()
        .map(|(i, (p, d))| {
            let ev = NoteEvent {
                kind: EventKind::Note(p),
                onset: t,
                duration: d,
                ornament: Some(OrnamentTag { kind, auxiliary: aux, piece: i as u8 }),
            };
            t += d;
            ev
        })
        .collect()
}

/// Ornaments `round_half_up(rate × N)` of the N sounded notes, chosen
/// uniformly without replacement. Returns how many were ornamented.
pub fn add_ornaments(measures: &mut [Measure], key: Key, rng: &mut Rng, rate: f64) -> usize {
    let positions: Vec<(usize, usize)> = measures
        .iter()
        .enumerate()
        .flat_map(|(mi, m)| {
            m.events
                .iter()
                .enumerate()
                .filter(|(_, e)| matches!(e.kind, EventKind::Note(_)) && e.ornament.is_none())
                .map(move |(ei, _)| (mi, ei))
        })
        .collect();
    let count = ornament_count(rate, positions.len());
    let mut chosen: Vec<(usize, usize)> =
        rng.sample_distinct(positions.len(), count).into_iter().map(|i| positions[i]).collect();
    // splice from the back so earlier indices stay valid
    chosen.sort_by(|a, b| b.cmp(a));
    for (mi, ei) in chosen {
        let m = &mut measures[mi];
        let chord = m.chord.expect("generated measures carry their chord");
        let ev = m.events[ei].clone();
        let main = ev.pitch().expect("note event");
        let (kind, aux) = choose_ornament(main, ev.duration, chord, key);
        m.events.splice(ei..=ei, realize_ornament(main, ev.onset, ev.duration, kind, aux));
    }
    count
}

/// A melody note as written before ornamentation.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalNote {
    pub pitch: Pitch,
    pub onset: Beats,
    pub duration: Beats,
    pub ornament: Option<(OrnamentKind, Pitch)>,
}

/// Collapses ornament pieces back into the notes they decorate.
pub fn logical_notes(measure: &Measure) -> Vec<LogicalNote> {
    let mut out: Vec<LogicalNote> = Vec::new();
    for e in measure.sounded_notes() {
        let Some(p) = e.pitch() else { continue };
        match e.ornament {
            Some(tag) if tag.piece > 0 => {
                let last = out.last_mut().expect("ornament pieces follow piece 0");
                last.duration += e.duration;
                if p != tag.auxiliary {
                    last.pitch = p;
                }
            }
            Some(tag) => out.push(LogicalNote {
                pitch: p,
                onset: e.onset,
                duration: e.duration,
                ornament: Some((tag.kind, tag.auxiliary)),
            }),
            None => out.push(LogicalNote { pitch: p, onset: e.onset, duration: e.duration, ornament: None }),
        }
    }
    out
}
