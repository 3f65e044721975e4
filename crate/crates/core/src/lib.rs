pub mod capture;
pub mod corpus;
pub mod explainer;
pub mod generator;
pub mod midi;
pub mod piece;
pub mod theory;

pub type AudioBufferF32 = capture::AudioBuffer<f32>;
pub type AudioBufferF64 = capture::AudioBuffer<f64>;
pub type YinConfigF32 = capture::YinConfig<f32>;
pub type YinConfigF64 = capture::YinConfig<f64>;
pub type CaptureF32 = capture::Capture<f32>;
pub type CaptureF64 = capture::Capture<f64>;
