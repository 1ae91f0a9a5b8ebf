//! Deterministic synthetic test material.

use std::f64::consts::PI;

use crate::scalar::Real;
use crate::signal::Signal;

pub const CLIP_SAMPLE_RATE: u32 = 16000;
pub const CLIP_SECONDS: f64 = 3.0;

/// Speech-like test clip: a harmonic tone whose fundamental glides from 140
/// to 260 Hz (12 partials, amplitude `1/h`), gated by a 4 Hz syllabic
/// envelope, plus an exponential chirp from 200 Hz to 6 kHz. Peak level 0.8.
pub fn test_clip<T: Real>() -> Signal<T> {
    let sr = CLIP_SAMPLE_RATE as f64;
    let n = (CLIP_SECONDS * sr) as usize;
    let (f_lo, f_hi) = (140.0, 260.0);
    let (c_lo, c_hi) = (200.0f64, 6000.0f64);
    let chirp_rate = (c_hi / c_lo).ln() / CLIP_SECONDS;
    let mut samples: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            // Phase of a linear glide f(t) = f_lo + (f_hi - f_lo) t / D.
            let base = 2.0 * PI * (f_lo * t + (f_hi - f_lo) * t * t / (2.0 * CLIP_SECONDS));
            let harmonic: f64 = (1..=12)
                .filter(|&h| h as f64 * (f_lo + (f_hi - f_lo) * t / CLIP_SECONDS) < sr / 2.0)
                .map(|h| (h as f64 * base).sin() / h as f64)
                .sum();
            let syllable = 0.5 - 0.5 * (2.0 * PI * 4.0 * t).cos();
            let chirp_phase = 2.0 * PI * c_lo * ((chirp_rate * t).exp() - 1.0) / chirp_rate;
            syllable * harmonic + 0.3 * chirp_phase.sin()
        })
        .collect();
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in &mut samples {
        *v *= 0.8 / peak;
    }
    Signal::new(samples.into_iter().map(T::lit).collect(), CLIP_SAMPLE_RATE)
        .expect("finite samples and a positive rate")
}
