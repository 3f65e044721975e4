use num_traits::Float;

/// YIN parameters. Frame and hop are in samples at 44.1/48 kHz; higher rates
/// scale both so the lag search still fits in half a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YinConfig<T> {
    pub threshold: T,
    pub silence_rms: T,
    pub min_hz: T,
    pub max_hz: T,
    pub frame_len: usize,
    pub hop: usize,
    pub median_width: usize,
}

impl<T: Float> Default for YinConfig<T> {
    fn default() -> Self {
        let c = |v: f64| T::from(v).unwrap();
        YinConfig {
            threshold: c(0.15),
            silence_rms: c(0.01),
            min_hz: c(70.0),
            max_hz: c(1000.0),
            frame_len: 2048,
            hop: 256,
            median_width: 5,
        }
    }
}

impl<T: Float> YinConfig<T> {
    pub fn max_lag(&self, sample_rate: u32) -> usize {
        (T::from(sample_rate).unwrap() / self.min_hz).ceil().to_usize().unwrap()
    }

    pub fn min_lag(&self, sample_rate: u32) -> usize {
        (T::from(sample_rate).unwrap() / self.max_hz).floor().to_usize().unwrap().max(2)
    }

    /// (frame, hop) actually used at `sample_rate`.
    pub fn frame_geometry(&self, sample_rate: u32) -> (usize, usize) {
        let need = 2 * self.max_lag(sample_rate);
        let mut scale = 1;
        while self.frame_len * scale < need {
            scale *= 2;
        }
        (self.frame_len * scale, self.hop * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YinEstimate<T> {
    pub f0: Option<T>,
    /// 1 − d′(τ) at the chosen lag, clamped to [0, 1].
    pub confidence: T,
    pub rms: T,
}

pub fn rms<T: Float>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    let sum = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
    (sum / T::from(x.len()).unwrap()).sqrt()
}

/// One YIN estimate for `frame`.
pub fn yin_frame<T: Float>(frame: &[T], sample_rate: u32, cfg: &YinConfig<T>) -> YinEstimate<T> {
    let level = rms(frame);
    let unvoiced = |confidence| YinEstimate { f0: None, confidence, rms: level };
    if level < cfg.silence_rms {
        return unvoiced(T::zero());
    }
    let max_lag = cfg.max_lag(sample_rate).min(frame.len() / 2);
    let min_lag = cfg.min_lag(sample_rate);
    if max_lag <= min_lag + 1 {
        return unvoiced(T::zero());
    }
    let window = frame.len() - max_lag;

    // difference function d(τ) for τ in 0..=max_lag
    let mut d = vec![T::zero(); max_lag + 1];
    for (tau, slot) in d.iter_mut().enumerate().skip(1) {
        let mut acc = T::zero();
        for j in 0..window {
            let diff = frame[j] - frame[j + tau];
            acc = acc + diff * diff;
        }
        *slot = acc;
    }

    // cumulative mean normalized difference d′(τ)
    let mut cmnd = vec![T::one(); max_lag + 1];
    let mut running = T::zero();
    for tau in 1..=max_lag {
        running = running + d[tau];
        cmnd[tau] = if running > T::zero() { d[tau] * T::from(tau).unwrap() / running } else { T::one() };
    }

    let mut tau = min_lag;
    let found = loop {
        if tau >= max_lag {
            break None;
        }
        if cmnd[tau] < cfg.threshold {
            while tau + 1 < max_lag && cmnd[tau + 1] < cmnd[tau] {
                tau += 1;
            }
            break Some(tau);
        }
        tau += 1;
    };
    let Some(tau) = found else {
        let best = cmnd[min_lag..max_lag].iter().fold(T::infinity(), |a, &b| a.min(b));
        return unvoiced((T::one() - best).max(T::zero()).min(T::one()));
    };

    let refined = parabolic_vertex(&cmnd, tau);
    let confidence = (T::one() - cmnd[tau]).max(T::zero()).min(T::one());
    YinEstimate { f0: Some(T::from(sample_rate).unwrap() / refined), confidence, rms: level }
}

/// Vertex of the parabola through (τ−1, τ, τ+1).
fn parabolic_vertex<T: Float>(y: &[T], tau: usize) -> T {
    let t = T::from(tau).unwrap();
    if tau == 0 || tau + 1 >= y.len() {
        return t;
    }
    let (a, b, c) = (y[tau - 1], y[tau], y[tau + 1]);
    let denom = a - (b + b) + c;
    if denom.abs() <= T::epsilon() {
        return t;
    }
    let half = T::from(0.5).unwrap();
    let shift = half * (a - c) / denom;
    if shift.abs() > T::one() {
        t
    } else {
        t + shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capture::synth;

    fn estimate(samples: &[f64]) -> Option<f64> {
        yin_frame(&samples[..2048], 44_100, &YinConfig::default()).f0
    }

    #[test]
    fn sine_440() {
        let a = synth::sine::<f64>(440.0, 44_100, 0.1, 0.5);
        let f = estimate(&a.samples).unwrap();
        assert!((f - 440.0).abs() / 440.0 < 0.01, "{f}");
    }

    #[test]
    fn silence_is_unvoiced() {
        let e = yin_frame(&[0.0f32; 2048], 44_100, &YinConfig::default());
        assert_eq!(e.f0, None);
        assert_eq!(e.rms, 0.0);
    }

    #[test]
    fn quiet_signal_gated() {
        let a = synth::sine::<f64>(440.0, 44_100, 0.1, 0.005);
        assert_eq!(estimate(&a.samples), None);
    }

    #[test]
    fn sawtooth_no_octave_error() {
        let a = synth::sawtooth::<f64>(220.0, 44_100, 0.1, 0.5);
        let f = estimate(&a.samples).unwrap();
        assert!((f - 220.0).abs() / 220.0 < 0.01, "{f}");
    }

    #[test]
    fn white_noise_mostly_unvoiced() {
        let a = synth::noise::<f64>(44_100, 0.1, 0.5, 7);
        let e = yin_frame(&a.samples[..2048], 44_100, &YinConfig::default());
        assert_eq!(e.f0, None);
        assert!(e.confidence < 0.85);
    }

    #[test]
    fn f32_and_f64_agree() {
        let a32 = synth::sine::<f32>(330.0, 44_100, 0.1, 0.5);
        let a64 = synth::sine::<f64>(330.0, 44_100, 0.1, 0.5);
        let f32v = yin_frame(&a32.samples[..2048], 44_100, &YinConfig::default()).f0.unwrap();
        let f64v = yin_frame(&a64.samples[..2048], 44_100, &YinConfig::default()).f0.unwrap();
        assert!((f32v as f64 - f64v).abs() < 0.05);
    }

    #[test]
    fn geometry_scales_at_high_rates() {
        let c = YinConfig::<f64>::default();
        assert_eq!(c.frame_geometry(44_100), (2048, 256));
        assert_eq!(c.frame_geometry(48_000), (2048, 256));
        assert_eq!(c.frame_geometry(96_000), (4096, 512));
        assert_eq!(c.frame_geometry(192_000), (8192, 1024));
    }
}
