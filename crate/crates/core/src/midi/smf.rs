//! Standard MIDI File chunk/event codec.

use serde::{Deserialize, Serialize};

use super::MidiError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackEventKind {
    NoteOn { channel: u8, key: u8, velocity: u8 },
    NoteOff { channel: u8, key: u8, velocity: u8 },
    /// Microseconds per quarter note.
    Tempo(u32),
    EndOfTrack,
    /// Any other channel message, kept verbatim (status byte plus data bytes).
    Channel { status: u8, data: Vec<u8> },
    /// Any other meta event, kept verbatim.
    Meta { kind: u8, data: Vec<u8> },
    /// `F0`/`F7` system exclusive, kept verbatim.
    SysEx { status: u8, data: Vec<u8> },
}

impl TrackEventKind {
    /// Note-on with velocity zero counts as a note-off.
    pub fn note_on(&self) -> Option<(u8, u8)> {
        match *self {
            TrackEventKind::NoteOn { channel, key, velocity } if velocity > 0 => Some((channel, key)),
            _ => None,
        }
    }

    pub fn note_off(&self) -> Option<(u8, u8)> {
        match *self {
            TrackEventKind::NoteOff { channel, key, .. } => Some((channel, key)),
            TrackEventKind::NoteOn { channel, key, velocity: 0 } => Some((channel, key)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackEvent {
    pub delta: u32,
    pub kind: TrackEventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Track {
    pub events: Vec<TrackEvent>,
}

impl Track {
    /// Events paired with absolute tick positions.
    pub fn absolute(&self) -> impl Iterator<Item = (u64, &TrackEventKind)> {
        let mut tick = 0u64;
        self.events.iter().map(move |e| {
            tick += e.delta as u64;
            (tick, &e.kind)
        })
    }

    pub fn length_ticks(&self) -> u64 {
        self.events.iter().map(|e| e.delta as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmfDocument {
    pub format: u16,
    /// Ticks per quarter note.
    pub division: u16,
    pub tracks: Vec<Track>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], MidiError> {
        if self.bytes.len() - self.pos < n {
            return Err(MidiError::TruncatedChunk { offset: self.pos });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, MidiError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, MidiError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self) -> Result<u32, MidiError> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.u8()?;
            value = (value << 7) | (b & 0x7f) as u32;
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::BadVarLen { offset: start })
    }

    fn done(&self) -> bool {
        self.pos >= self.bytes.len()
    }
}

/// Minimal-length variable-length quantity.
pub fn write_vlq(out: &mut Vec<u8>, value: u32) {
    assert!(value < 1 << 28, "VLQ values are limited to 28 bits");
    let mut groups = [0u8; 4];
    let mut n = 0;
    let mut v = value;
    loop {
        groups[n] = (v & 0x7f) as u8;
        n += 1;
        v >>= 7;
        if v == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        out.push(groups[i] | if i > 0 { 0x80 } else { 0 });
    }
}

fn data_len(status: u8) -> usize {
    match status & 0xf0 {
        0xc0 | 0xd0 => 1,
        _ => 2,
    }
}

fn parse_track(body: &[u8], base: usize) -> Result<Track, MidiError> {
    let mut r = Reader { bytes: body, pos: 0 };
    let mut events = Vec::new();
    let mut running: Option<u8> = None;
    while !r.done() {
        let delta = r.vlq().map_err(|e| e.shift(base))?;
        let first = r.u8().map_err(|e| e.shift(base))?;
        let kind = match first {
            0xff => {
                let kind = r.u8().map_err(|e| e.shift(base))?;
                let len = r.vlq().map_err(|e| e.shift(base))? as usize;
                let data = r.take(len).map_err(|e| e.shift(base))?;
                running = None;
                match kind {
                    0x2f => TrackEventKind::EndOfTrack,
                    0x51 if len == 3 => {
                        TrackEventKind::Tempo(u32::from_be_bytes([0, data[0], data[1], data[2]]))
                    }
                    _ => TrackEventKind::Meta { kind, data: data.to_vec() },
                }
            }
            0xf0 | 0xf7 => {
                let len = r.vlq().map_err(|e| e.shift(base))? as usize;
                let data = r.take(len).map_err(|e| e.shift(base))?;
                running = None;
                TrackEventKind::SysEx { status: first, data: data.to_vec() }
            }
            _ => {
                let (status, mut data) = if first & 0x80 != 0 {
                    running = Some(first);
                    (first, Vec::with_capacity(2))
                } else {
                    let status = running.ok_or(MidiError::MissingStatus { offset: base + r.pos - 1 })?;
                    (status, vec![first])
                };
                while data.len() < data_len(status) {
                    data.push(r.u8().map_err(|e| e.shift(base))?);
                }
                let channel = status & 0x0f;
                match status & 0xf0 {
                    0x90 => TrackEventKind::NoteOn { channel, key: data[0], velocity: data[1] },
                    0x80 => TrackEventKind::NoteOff { channel, key: data[0], velocity: data[1] },
                    _ => TrackEventKind::Channel { status, data },
                }
            }
        };
        let end = kind == TrackEventKind::EndOfTrack;
        events.push(TrackEvent { delta, kind });
        if end {
            break;
        }
    }
    let track = Track { events };
    check_note_pairs(&track)?;
    Ok(track)
}

fn check_note_pairs(track: &Track) -> Result<(), MidiError> {
    let mut open: Vec<((u8, u8), u64)> = Vec::new();
    for (tick, kind) in track.absolute() {
        if let Some(k) = kind.note_off() {
            if let Some(pos) = open.iter().position(|(n, _)| *n == k) {
                open.remove(pos);
            }
        } else if let Some(k) = kind.note_on() {
            open.push((k, tick));
        }
    }
    match open.first() {
        Some(&((_, key), tick)) => Err(MidiError::UnmatchedNoteOn { key, tick }),
        None => Ok(()),
    }
}

/// Decodes an SMF byte stream. Unknown chunks are skipped.
pub fn parse_smf(bytes: &[u8]) -> Result<SmfDocument, MidiError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4).map_err(|_| MidiError::MalformedHeader("file shorter than a header".into()))?;
    if magic != b"MThd" {
        return Err(MidiError::MalformedHeader(format!("bad magic {:?}", String::from_utf8_lossy(magic))));
    }
    let len = r.u32().map_err(|_| MidiError::MalformedHeader("truncated header".into()))? as usize;
    if len < 6 {
        return Err(MidiError::MalformedHeader(format!("header length {len} < 6")));
    }
    let header = r.take(len).map_err(|_| MidiError::MalformedHeader("truncated header".into()))?;
    let format = u16::from_be_bytes([header[0], header[1]]);
    let ntracks = u16::from_be_bytes([header[2], header[3]]);
    let division = u16::from_be_bytes([header[4], header[5]]);
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    if division & 0x8000 != 0 || division == 0 {
        return Err(MidiError::MalformedHeader("SMPTE or zero division is not supported".into()));
    }
    let mut tracks = Vec::with_capacity(ntracks as usize);
    while tracks.len() < ntracks as usize {
        let chunk_start = r.pos;
        let id = r.take(4)?;
        let len = r.u32()? as usize;
        let body = r.take(len).map_err(|_| MidiError::TruncatedChunk { offset: chunk_start })?;
        if id == b"MTrk" {
            tracks.push(parse_track(body, chunk_start + 8)?);
        }
    }
    Ok(SmfDocument { format, division, tracks })
}

fn write_event(out: &mut Vec<u8>, kind: &TrackEventKind) {
    match kind {
        TrackEventKind::NoteOn { channel, key, velocity } => out.extend([0x90 | channel, *key, *velocity]),
        TrackEventKind::NoteOff { channel, key, velocity } => out.extend([0x80 | channel, *key, *velocity]),
        TrackEventKind::Tempo(t) => {
            out.extend([0xff, 0x51, 0x03]);
            out.extend(&t.to_be_bytes()[1..]);
        }
        TrackEventKind::EndOfTrack => out.extend([0xff, 0x2f, 0x00]),
        TrackEventKind::Channel { status, data } => {
            out.push(*status);
            out.extend(data);
        }
        TrackEventKind::Meta { kind, data } => {
            out.extend([0xff, *kind]);
            write_vlq(out, data.len() as u32);
            out.extend(data);
        }
        TrackEventKind::SysEx { status, data } => {
            out.push(*status);
            write_vlq(out, data.len() as u32);
            out.extend(data);
        }
    }
}

/// Encodes a document. Running status is never used, so output is canonical.
pub fn write_smf(doc: &SmfDocument) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend(b"MThd");
    out.extend(6u32.to_be_bytes());
    out.extend(doc.format.to_be_bytes());
    out.extend((doc.tracks.len() as u16).to_be_bytes());
    out.extend(doc.division.to_be_bytes());
    for track in &doc.tracks {
        let mut body = Vec::new();
        for ev in &track.events {
            write_vlq(&mut body, ev.delta);
            write_event(&mut body, &ev.kind);
        }
        out.extend(b"MTrk");
        out.extend((body.len() as u32).to_be_bytes());
        out.extend(body);
    }
    out
}
