use cadenza_core::capture::{capture_wav, CancelToken, PitchTrack, SegmentConfig, YinConfig};
use cadenza_core::midi::read_score;
use cadenza_core::theory::{check_bpm, Score};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

pub const DEFAULT_BPM: u16 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Wav,
    Midi,
}

impl InputFormat {
    /// Sniffs the container from the leading bytes, falling back to the file name.
    pub fn detect(bytes: &[u8], file_name: Option<&str>) -> Result<InputFormat, ServiceError> {
        let ext = file_name
            .and_then(|n| n.rsplit_once('.'))
            .map(|(_, e)| e.to_ascii_lowercase())
            .unwrap_or_default();
        let mp3_magic = bytes.starts_with(b"ID3") || (bytes.len() > 1 && bytes[0] == 0xFF && bytes[1] & 0xE0 == 0xE0);
        if ext == "mp3" || mp3_magic {
            return Err(ServiceError::UnsupportedMedia(
                "mp3 uploads are not supported; convert the recording to .wav or upload a .mid file".into(),
            ));
        }
        if bytes.starts_with(b"RIFF") {
            return Ok(InputFormat::Wav);
        }
        if bytes.starts_with(b"MThd") {
            return Ok(InputFormat::Midi);
        }
        match ext.as_str() {
            "wav" | "wave" => Ok(InputFormat::Wav),
            "mid" | "midi" | "smf" => Ok(InputFormat::Midi),
            _ => Err(ServiceError::UnsupportedMedia("expected a .wav recording or a .mid file".into())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub score: Score,
    pub pitch_track: Option<PitchTrack<f64>>,
}

/// Audio goes through pitch capture at `bpm` (default 120); MIDI keeps its
/// own tempo unless `bpm` overrides it.
pub fn decode_input(format: InputFormat, bytes: &[u8], bpm: Option<u16>) -> Result<Decoded, ServiceError> {
    if let Some(b) = bpm {
        check_bpm(b)?;
    }
    match format {
        InputFormat::Wav => {
            let cap = capture_wav::<f64>(
                bytes,
                bpm.unwrap_or(DEFAULT_BPM),
                &YinConfig::default(),
                &SegmentConfig::default(),
                &CancelToken::new(),
            )?;
            Ok(Decoded { score: cap.score, pitch_track: Some(cap.track) })
        }
        InputFormat::Midi => {
            let mut score = read_score(bytes)?;
            if let Some(b) = bpm {
                score.bpm = b;
            }
            Ok(Decoded { score, pitch_track: None })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magic_bytes_beat_the_extension() {
        assert_eq!(InputFormat::detect(b"RIFF....WAVE", Some("take.mid")).unwrap(), InputFormat::Wav);
        assert_eq!(InputFormat::detect(b"MThd\0\0\0\x06", Some("take.wav")).unwrap(), InputFormat::Midi);
        assert_eq!(InputFormat::detect(b"", Some("Take.MID")).unwrap(), InputFormat::Midi);
    }

    #[test]
    fn mp3_and_unknown_are_unsupported() {
        for (bytes, name) in [(&b"ID3\x04"[..], None), (&[0xFF, 0xFB, 0x90][..], None), (&b"x"[..], Some("a.mp3")), (&b"hello"[..], Some("a.txt"))] {
            assert!(matches!(InputFormat::detect(bytes, name), Err(ServiceError::UnsupportedMedia(_))), "{name:?}");
        }
    }

    #[test]
    fn bpm_is_checked_before_decoding() {
        assert!(matches!(decode_input(InputFormat::Midi, b"MThd", Some(10)), Err(ServiceError::BadRequest(_))));
        assert!(decode_input(InputFormat::Midi, b"MThd", Some(120)).unwrap_err().is_input_error());
    }
}
