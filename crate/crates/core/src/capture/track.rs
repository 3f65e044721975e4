use std::io::{self, Write};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_traits::Float;

use super::yin::{yin_frame, YinConfig};
use super::{AudioBuffer, CaptureError};

/// Cooperative cancellation flag shared with the caller.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchFrame<T> {
    /// Centre of the analysis window, in seconds.
    pub time: f64,
    pub f0: Option<T>,
    pub confidence: T,
    pub rms: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack<T> {
    pub frames: Vec<PitchFrame<T>>,
    pub hop_seconds: f64,
}

impl<T: Float> PitchTrack<T> {
    pub fn voiced(&self) -> impl Iterator<Item = &PitchFrame<T>> {
        self.frames.iter().filter(|f| f.f0.is_some())
    }
}

/// Slides YIN over the buffer, then median-filters f0 over voiced neighbours.
pub fn track_pitch<T: Float>(
    audio: &AudioBuffer<T>,
    cfg: &YinConfig<T>,
    cancel: &CancelToken,
) -> Result<PitchTrack<T>, CaptureError> {
    let sr = audio.sample_rate;
    let (frame_len, hop) = cfg.frame_geometry(sr);
    let n = audio.samples.len();
    let mut frames = Vec::new();
    let mut padded;
    let mut start = 0;
    while start < n {
        if cancel.is_cancelled() {
            return Err(CaptureError::Cancelled);
        }
        let window: &[T] = if start + frame_len <= n {
            &audio.samples[start..start + frame_len]
        } else if start == 0 {
            // shorter than one frame: analyse it zero-padded
            padded = audio.samples.clone();
            padded.resize(frame_len, T::zero());
            &padded
        } else {
            break;
        };
        let e = yin_frame(window, sr, cfg);
        let time = (start as f64 + frame_len as f64 / 2.0) / sr as f64;
        frames.push(PitchFrame { time, f0: e.f0, confidence: e.confidence, rms: e.rms });
        start += hop;
    }
    median_filter(&mut frames, cfg.median_width);
    Ok(PitchTrack { frames, hop_seconds: hop as f64 / sr as f64 })
}

/// Voiced frames take the median of the voiced values in a centred window;
/// unvoiced frames stay unvoiced. With an even count the lower middle wins.
fn median_filter<T: Float>(frames: &mut [PitchFrame<T>], width: usize) {
    if width < 2 {
        return;
    }
    let half = width / 2;
    let original: Vec<Option<T>> = frames.iter().map(|f| f.f0).collect();
    let mut buf = Vec::with_capacity(width);
    for (i, frame) in frames.iter_mut().enumerate() {
        if original[i].is_none() {
            continue;
        }
        buf.clear();
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(original.len());
        buf.extend(original[lo..hi].iter().flatten().copied());
        buf.sort_by(|a, b| a.partial_cmp(b).unwrap());
        frame.f0 = Some(buf[(buf.len() - 1) / 2]);
    }
}

/// `time,f0,confidence` rows; unvoiced frames leave f0 empty.
pub fn write_pitch_csv<T: Float, W: Write>(track: &PitchTrack<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "time,f0,confidence")?;
    for f in &track.frames {
        let f0 = f.f0.map(|v| format!("{:.3}", v.to_f64().unwrap())).unwrap_or_default();
        writeln!(out, "{:.6},{},{:.4}", f.time, f0, f.confidence.to_f64().unwrap())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capture::synth;

    fn track(a: &AudioBuffer<f64>) -> PitchTrack<f64> {
        track_pitch(a, &YinConfig::default(), &CancelToken::new()).unwrap()
    }

    #[test]
    fn constant_tone() {
        let t = track(&synth::sine(440.0, 44_100, 1.0, 0.5));
        let voiced: Vec<f64> = t.voiced().map(|f| f.f0.unwrap()).collect();
        assert!(voiced.len() > 150);
        assert!(voiced.iter().all(|f| (f - 440.0).abs() < 4.4));
        let dt: Vec<f64> = t.frames.windows(2).map(|w| w[1].time - w[0].time).collect();
        assert!(dt.iter().all(|d| (d - 256.0 / 44_100.0).abs() < 1e-12));
    }

    #[test]
    fn silence_has_no_voiced_frames() {
        let t = track(&synth::silence(44_100, 0.5));
        assert!(!t.frames.is_empty());
        assert_eq!(t.voiced().count(), 0);
    }

    #[test]
    fn two_plateaus() {
        let t = track(&synth::melody(&[(440.0, 0.5), (494.0, 0.5)], 44_100, 0.5));
        let near = |target: f64| t.voiced().filter(|f| (f.f0.unwrap() - target).abs() / target < 0.01).count();
        assert!(near(440.0) > 60, "{}", near(440.0));
        assert!(near(494.0) > 60, "{}", near(494.0));
        // every 440 frame precedes every 494 frame
        let last440 = t.voiced().filter(|f| (f.f0.unwrap() - 440.0).abs() < 4.4).map(|f| f.time).fold(0.0, f64::max);
        let first494 =
            t.voiced().filter(|f| (f.f0.unwrap() - 494.0).abs() < 4.9).map(|f| f.time).fold(f64::MAX, f64::min);
        assert!(last440 < first494);
    }

    #[test]
    fn median_removes_single_octave_glitch() {
        let mut frames: Vec<PitchFrame<f64>> = (0..7)
            .map(|i| PitchFrame { time: i as f64, f0: Some(220.0), confidence: 0.9, rms: 0.3 })
            .collect();
        frames[3].f0 = Some(440.0);
        frames[5].f0 = None;
        median_filter(&mut frames, 5);
        assert_eq!(frames[3].f0, Some(220.0));
        assert_eq!(frames[5].f0, None);
    }

    #[test]
    fn short_clip_is_padded() {
        let t = track(&synth::sine(440.0, 44_100, 0.03, 0.5));
        assert_eq!(t.frames.len(), 1);
    }

    #[test]
    fn cancellation() {
        let c = CancelToken::new();
        c.cancel();
        let r = track_pitch(&synth::sine::<f64>(440.0, 44_100, 1.0, 0.5), &YinConfig::default(), &c);
        assert_eq!(r, Err(CaptureError::Cancelled));
    }

    #[test]
    fn csv_dump() {
        let t = track(&synth::melody(&[(0.0, 0.1), (440.0, 0.2)], 44_100, 0.5));
        let mut out = Vec::new();
        write_pitch_csv(&t, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time,f0,confidence"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), t.frames.len());
        assert!(rows[0].split(',').nth(1) == Some(""));
        assert!(rows.last().unwrap().split(',').nth(1).unwrap().starts_with("44"));
    }
}
