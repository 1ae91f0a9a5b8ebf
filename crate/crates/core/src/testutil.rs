//! Independent oracles and random inputs shared by unit tests.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mel::{MelFilterbank, MelSpectrogram};
use crate::solvers::Problem;
use crate::spectrogram::ComplexSpectrogram;
use crate::stft::{hann_periodic, Stft, StftConfig};

pub fn random_signal<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_spectrogram<R: Rng>(
    rng: &mut R,
    bins: usize,
    frames: usize,
) -> ComplexSpectrogram<f64> {
    let values = Array2::from_shape_fn((bins, frames), |_| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    ComplexSpectrogram::new(values).unwrap()
}

/// Dense real matrix of the STFT: row `2 * (t * F + k)` holds the real part
/// of bin `k` in frame `t`, the next row its imaginary part.
pub fn explicit_frame_matrix(cfg: &StftConfig, n_frames: usize) -> Array2<f64> {
    let (win, hop, bins) = (cfg.win_length(), cfg.hop_length(), cfg.n_bins());
    let w: Vec<f64> = hann_periodic(win);
    let mut g = Array2::zeros((2 * bins * n_frames, cfg.signal_len(n_frames)));
    for t in 0..n_frames {
        for k in 0..bins {
            for n in 0..win {
                let ang = -2.0 * std::f64::consts::PI * (k * n) as f64 / win as f64;
                let row = 2 * (t * bins + k);
                g[[row, t * hop + n]] = w[n] * ang.cos();
                g[[row + 1, t * hop + n]] = w[n] * ang.sin();
            }
        }
    }
    g
}

/// Least-squares projection of `x` onto the range of `g`, with interior
/// bins weighted twice as in the full two-sided spectrum.
pub fn weighted_projection(
    g: &Array2<f64>,
    cfg: &StftConfig,
    x: &ComplexSpectrogram<f64>,
) -> ComplexSpectrogram<f64> {
    let bins = cfg.n_bins();
    let (rows, cols) = g.dim();
    let weight = |row: usize| -> f64 {
        let k = (row / 2) % bins;
        if k == 0 || k == bins - 1 {
            1.0
        } else {
            2.0
        }
    };
    let a = DMatrix::from_fn(rows, cols, |r, c| weight(r).sqrt() * g[[r, c]]);
    let b = DVector::from_fn(rows, |r, _| {
        let (t, k) = ((r / 2) / bins, (r / 2) % bins);
        let z = x.values()[[k, t]];
        weight(r).sqrt() * if r % 2 == 0 { z.re } else { z.im }
    });
    let sol = a.svd(true, true).solve(&b, 1e-12).unwrap();
    let n_frames = x.n_frames();
    let mut out = Array2::from_elem((bins, n_frames), Complex::new(0.0, 0.0));
    for t in 0..n_frames {
        for k in 0..bins {
            let row = 2 * (t * bins + k);
            let re: f64 = (0..cols).map(|c| g[[row, c]] * sol[c]).sum();
            let im: f64 = (0..cols).map(|c| g[[row + 1, c]] * sol[c]).sum();
            out[[k, t]] = Complex::new(re, im);
        }
    }
    ComplexSpectrogram::new(out).unwrap()
}

/// A mel-spectrogram computed from a random signal, with the operators that
/// produced it.
pub struct Fixture {
    pub stft: Stft<f64>,
    pub bank: MelFilterbank<f64>,
    pub mel: MelSpectrogram<f64>,
    pub source: Vec<f64>,
}

impl Fixture {
    pub fn new(seed: u64, win: usize, hop: usize, n_mels: usize, len: usize) -> Self {
        let stft = Stft::new(StftConfig::new(win, hop).unwrap());
        let bank = MelFilterbank::new(16000, win, n_mels, 0.0, 8000.0).unwrap();
        let source = random_signal(&mut ChaCha8Rng::seed_from_u64(seed), len);
        let mel = bank
            .apply_mel(&stft.stft(&source).unwrap().magnitude())
            .unwrap();
        Self {
            stft,
            bank,
            mel,
            source,
        }
    }

    pub fn problem(&self) -> Problem<'_, f64> {
        Problem::new(&self.mel, &self.bank, &self.stft).unwrap()
    }
}
