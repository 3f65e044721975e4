//! Writes the demo melody (D and G arpeggios at 120 bpm, ending on D) as 16-bit WAV.

use cadenza_core::capture::encode_wav_pcm16;
use cadenza_core::capture::synth::{melody, midi_to_frequency};
use cadenza_core::AudioBufferF64;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "demo.wav".into());
    let tones: Vec<(f64, f64)> = [62u8, 66, 69, 74, 67, 71, 67, 74].iter().map(|&m| (midi_to_frequency(m), 0.5)).collect();
    let buf: AudioBufferF64 = melody(&tones, 22_050, 0.5);
    std::fs::write(&path, encode_wav_pcm16(&buf)).expect("write wav");
}
