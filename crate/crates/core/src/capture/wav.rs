use std::io::Cursor;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use num_traits::Float;

use super::CaptureError;

pub const MIN_SAMPLE_RATE: u32 = 8_000;
pub const MAX_SAMPLE_RATE: u32 = 192_000;

/// Mono samples in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer<T> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
}

impl<T: Float> AudioBuffer<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Self {
        AudioBuffer { samples, sample_rate }
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

fn map_hound(e: hound::Error) -> CaptureError {
    match e {
        hound::Error::Unsupported => CaptureError::UnsupportedEncoding("compressed or unknown format tag".into()),
        hound::Error::FormatError(m) => CaptureError::MalformedRiff(m.to_string()),
        hound::Error::IoError(e) => CaptureError::MalformedRiff(e.to_string()),
        other => CaptureError::MalformedRiff(other.to_string()),
    }
}

/// Decodes PCM (8/16/24/32-bit integer) or 32-bit float WAV; stereo is averaged.
pub fn decode_wav<T: Float>(bytes: &[u8]) -> Result<AudioBuffer<T>, CaptureError> {
    let reader = WavReader::new(Cursor::new(bytes)).map_err(map_hound)?;
    let spec = reader.spec();
    if !(1..=2).contains(&spec.channels) {
        return Err(CaptureError::UnsupportedEncoding(format!("{} channels", spec.channels)));
    }
    if !(MIN_SAMPLE_RATE..=MAX_SAMPLE_RATE).contains(&spec.sample_rate) {
        return Err(CaptureError::UnsupportedEncoding(format!("sample rate {} Hz", spec.sample_rate)));
    }
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader.into_samples::<f32>().collect::<Result<_, _>>().map_err(map_hound)?,
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = (1u64 << (bits - 1)) as f32;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f32 / scale))
                .collect::<Result<_, _>>()
                .map_err(map_hound)?
        }
        (fmt, bits) => {
            return Err(CaptureError::UnsupportedEncoding(format!("{bits}-bit {fmt:?}")));
        }
    };
    let channels = spec.channels as usize;
    let samples = interleaved
        .chunks_exact(channels)
        .map(|frame| {
            let sum: f32 = frame.iter().sum();
            T::from((sum / channels as f32).clamp(-1.0, 1.0)).unwrap()
        })
        .collect();
    Ok(AudioBuffer { samples, sample_rate: spec.sample_rate })
}

/// Mono 16-bit PCM; used for fixtures and round trips.
pub fn encode_wav_pcm16<T: Float>(audio: &AudioBuffer<T>) -> Vec<u8> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut out = Cursor::new(Vec::new());
    {
        let mut w = WavWriter::new(&mut out, spec).expect("in-memory writer");
        for s in &audio.samples {
            let v = (s.to_f64().unwrap().clamp(-1.0, 1.0) * 32767.0).round() as i16;
            w.write_sample(v).expect("in-memory write");
        }
        w.finalize().expect("in-memory finalize");
    }
    out.into_inner()
}
