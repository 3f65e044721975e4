//! Synthetic test signals.

use std::f64::consts::TAU;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AudioBuffer;

fn render<T: Float>(sample_rate: u32, seconds: f64, f: impl Fn(f64) -> f64) -> AudioBuffer<T> {
    let n = (seconds * sample_rate as f64).round() as usize;
    let samples = (0..n).map(|i| T::from(f(i as f64 / sample_rate as f64)).unwrap()).collect();
    AudioBuffer::new(samples, sample_rate)
}

pub fn sine<T: Float>(freq: f64, sample_rate: u32, seconds: f64, amplitude: f64) -> AudioBuffer<T> {
    render(sample_rate, seconds, |t| amplitude * (TAU * freq * t).sin())
}

pub fn sawtooth<T: Float>(freq: f64, sample_rate: u32, seconds: f64, amplitude: f64) -> AudioBuffer<T> {
    render(sample_rate, seconds, |t| {
        let phase = (freq * t).fract();
        amplitude * (2.0 * phase - 1.0)
    })
}

pub fn silence<T: Float>(sample_rate: u32, seconds: f64) -> AudioBuffer<T> {
    render(sample_rate, seconds, |_| 0.0)
}

pub fn noise<T: Float>(sample_rate: u32, seconds: f64, amplitude: f64, seed: u64) -> AudioBuffer<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (seconds * sample_rate as f64).round() as usize;
    let samples = (0..n).map(|_| T::from(amplitude * rng.random_range(-1.0..1.0)).unwrap()).collect();
    AudioBuffer::new(samples, sample_rate)
}

/// Sequence of (frequency, seconds) tones; frequency 0 means silence.
/// Phase is carried across segments so joins do not click.
pub fn melody<T: Float>(tones: &[(f64, f64)], sample_rate: u32, amplitude: f64) -> AudioBuffer<T> {
    let mut samples = Vec::new();
    let mut phase = 0.0f64;
    for &(freq, seconds) in tones {
        let n = (seconds * sample_rate as f64).round() as usize;
        for _ in 0..n {
            samples.push(T::from(if freq > 0.0 { amplitude * (TAU * phase).sin() } else { 0.0 }).unwrap());
            phase = (phase + freq / sample_rate as f64).fract();
        }
    }
    AudioBuffer::new(samples, sample_rate)
}

pub fn midi_to_frequency(midi: u8) -> f64 {
    440.0 * 2f64.powf((midi as f64 - 69.0) / 12.0)
}
