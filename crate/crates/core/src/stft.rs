//! Short-time Fourier transform without center padding, its canonical
//! pseudo-inverse, and its adjoint.
//!
//! Frame `t` covers samples `[t * hop, t * hop + win)`; trailing samples that
//! do not fill a frame are dropped. Spectra are one-sided: `win / 2 + 1` bins.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrogram::{check_shape, ComplexSpectrogram, MagnitudeSpectrogram};

/// Window-square sums below this are treated as zero by [`Stft::istft`].
pub const WINDOW_SQUARE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftConfig {
    win_length: usize,
    hop_length: usize,
}

impl StftConfig {
    /// The window is always a periodic Hann window of `win_length` samples.
    /// `win_length` must be even, a multiple of `hop_length`, and at least
    /// twice `hop_length`.
    pub fn new(win_length: usize, hop_length: usize) -> Result<Self> {
        if hop_length == 0 {
            return Err(Error::Config("hop length must be positive".into()));
        }
        if win_length < 2 || !win_length.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "window length must be even and >= 2, got {win_length}"
            )));
        }
        if !win_length.is_multiple_of(hop_length) {
            return Err(Error::Config(format!(
                "hop length {hop_length} must divide window length {win_length}"
            )));
        }
        if win_length < 2 * hop_length {
            return Err(Error::Config(format!(
                "window length {win_length} must be at least twice the hop length {hop_length}"
            )));
        }
        Ok(Self {
            win_length,
            hop_length,
        })
    }

    pub fn win_length(&self) -> usize {
        self.win_length
    }

    pub fn hop_length(&self) -> usize {
        self.hop_length
    }

    pub fn n_bins(&self) -> usize {
        self.win_length / 2 + 1
    }

    pub fn n_frames(&self, signal_len: usize) -> Result<usize> {
        if signal_len < self.win_length {
            return Err(Error::SignalTooShort {
                len: signal_len,
                win_length: self.win_length,
            });
        }
        Ok((signal_len - self.win_length) / self.hop_length + 1)
    }

    /// Length of the signal synthesized from `n_frames` frames.
    pub fn signal_len(&self, n_frames: usize) -> usize {
        if n_frames == 0 {
            0
        } else {
            (n_frames - 1) * self.hop_length + self.win_length
        }
    }
}

/// Periodic (DFT-even) Hann window: `w[n] = 0.5 - 0.5 cos(2 pi n / len)`.
pub fn hann_periodic<T: Real>(len: usize) -> Vec<T> {
    (0..len)
        .map(|n| {
            let phase = 2.0 * std::f64::consts::PI * n as f64 / len as f64;
            T::lit(0.5 - 0.5 * phase.cos())
        })
        .collect()
}

/// Output of [`Stft::istft`].
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis<T> {
    pub samples: Vec<T>,
    /// Samples set to zero because the overlapped window-square sum there is
    /// below [`WINDOW_SQUARE_FLOOR`].
    pub zeroed: usize,
}

/// STFT analysis/synthesis operator for one configuration.
///
/// Holds precomputed FFT plans; every method takes `&self` and allocates its
/// own buffers, so a single instance can be shared between threads.
#[derive(Clone)]
pub struct Stft<T: Real> {
    config: StftConfig,
    window: Vec<T>,
    forward: Arc<dyn RealToComplex<T>>,
    inverse: Arc<dyn ComplexToReal<T>>,
}

impl<T: Real> fmt::Debug for Stft<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stft")
            .field("config", &self.config)
            .finish()
    }
}

impl<T: Real> Stft<T> {
    pub fn new(config: StftConfig) -> Self {
        let mut planner = RealFftPlanner::<T>::new();
        Self {
            config,
            window: hann_periodic(config.win_length),
            forward: planner.plan_fft_forward(config.win_length),
            inverse: planner.plan_fft_inverse(config.win_length),
        }
    }

    pub fn config(&self) -> &StftConfig {
        &self.config
    }

    pub fn window(&self) -> &[T] {
        &self.window
    }

    pub fn n_bins(&self) -> usize {
        self.config.n_bins()
    }

    /// Forward transform `G(x)`.
    pub fn stft(&self, signal: &[T]) -> Result<ComplexSpectrogram<T>> {
        let n_frames = self.config.n_frames(signal.len())?;
        let (win, hop) = (self.config.win_length, self.config.hop_length);
        let mut values = Array2::zeros((self.n_bins(), n_frames));
        let mut frame = self.forward.make_input_vec();
        let mut spectrum = self.forward.make_output_vec();
        let mut scratch = self.forward.make_scratch_vec();
        for (t, mut column) in values.columns_mut().into_iter().enumerate() {
            let chunk = &signal[t * hop..t * hop + win];
            for ((dst, &x), &w) in frame.iter_mut().zip(chunk).zip(&self.window) {
                *dst = x * w;
            }
            self.forward
                .process_with_scratch(&mut frame, &mut spectrum, &mut scratch)
                .expect("buffer sizes come from the plan");
            column.assign(&ndarray::ArrayView1::from(&spectrum[..]));
        }
        Ok(ComplexSpectrogram::from_raw(values))
    }

    /// Overlapped window-square sum for a signal of `n_frames` frames.
    pub fn window_square_sum(&self, n_frames: usize) -> Vec<T> {
        let hop = self.config.hop_length;
        let mut sum = vec![T::zero(); self.config.signal_len(n_frames)];
        for t in 0..n_frames {
            for (acc, &w) in sum[t * hop..].iter_mut().zip(&self.window) {
                *acc += w * w;
            }
        }
        sum
    }

    /// Overlap-adds `scale * window * irfft(column)` over all frames, where
    /// `prepare` adjusts each one-sided column before the real inverse FFT.
    fn overlap_add(
        &self,
        spec: &ComplexSpectrogram<T>,
        scale: T,
        prepare: impl Fn(&mut [Complex<T>]),
    ) -> Result<Vec<T>> {
        check_shape(
            "spectrogram bins",
            (self.n_bins(), spec.n_frames()),
            spec.shape(),
        )?;
        let (win, hop) = (self.config.win_length, self.config.hop_length);
        let mut out = vec![T::zero(); self.config.signal_len(spec.n_frames())];
        let mut column = self.inverse.make_input_vec();
        let mut frame = self.inverse.make_output_vec();
        let mut scratch = self.inverse.make_scratch_vec();
        let nyquist = win / 2;
        for (t, col) in spec.values().columns().into_iter().enumerate() {
            for (dst, &z) in column.iter_mut().zip(col.iter()) {
                *dst = z;
            }
            prepare(&mut column);
            // The real inverse requires purely real DC and Nyquist bins.
            column[0].im = T::zero();
            column[nyquist].im = T::zero();
            self.inverse
                .process_with_scratch(&mut column, &mut frame, &mut scratch)
                .expect("buffer sizes come from the plan");
            for ((acc, &v), &w) in out[t * hop..t * hop + win]
                .iter_mut()
                .zip(&frame)
                .zip(&self.window)
            {
                *acc += v * w * scale;
            }
        }
        Ok(out)
    }

    /// Canonical pseudo-inverse `G†`: windowed overlap-add of the inverse
    /// DFTs divided by the overlapped window-square sum.
    pub fn istft(&self, spec: &ComplexSpectrogram<T>) -> Result<Synthesis<T>> {
        let inv_n = T::one() / T::lit(self.config.win_length as f64);
        let mut samples = self.overlap_add(spec, inv_n, |_| {})?;
        let wss = self.window_square_sum(spec.n_frames());
        let floor = T::lit(WINDOW_SQUARE_FLOOR);
        let mut zeroed = 0;
        for (x, &d) in samples.iter_mut().zip(&wss) {
            if d < floor {
                *x = T::zero();
                zeroed += 1;
            } else {
                *x /= d;
            }
        }
        Ok(Synthesis { samples, zeroed })
    }

    /// Adjoint of [`Stft::stft`] with respect to the real inner products
    /// `Re<X, S>` on one-sided spectrograms and `<x, y>` on signals. Every
    /// stored bin, DC and Nyquist included, contributes once.
    pub fn stft_adjoint(&self, spec: &ComplexSpectrogram<T>) -> Result<Vec<T>> {
        let nyquist = self.config.win_length / 2;
        let two = T::lit(2.0);
        // irfft counts interior bins twice, so DC and Nyquist are doubled and
        // the result halved.
        self.overlap_add(spec, T::lit(0.5), |col| {
            col[0].re *= two;
            col[nyquist].re *= two;
        })
    }

    /// Projection onto the set of consistent spectrograms: `G(G†(X))`.
    pub fn project_consistency(
        &self,
        spec: &ComplexSpectrogram<T>,
    ) -> Result<ComplexSpectrogram<T>> {
        let synthesis = self.istft(spec)?;
        self.stft(&synthesis.samples)
    }
}

/// Projection onto the set of spectrograms with magnitude `target`:
/// `target * X / |X|`, with `0 / |0| = 0`.
pub fn project_magnitude<T: Real>(
    spec: &ComplexSpectrogram<T>,
    target: &MagnitudeSpectrogram<T>,
) -> Result<ComplexSpectrogram<T>> {
    check_shape("magnitude target", spec.shape(), target.shape())?;
    let values = Zip::from(spec.values())
        .and(target.values())
        .map_collect(|&z, &a| unit_phase(z) * a);
    Ok(ComplexSpectrogram::from_raw(values))
}

/// `z / |z|`, or zero when `z == 0`.
#[inline]
pub(crate) fn unit_phase<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.norm();
    if r == T::zero() {
        Complex::new(T::zero(), T::zero())
    } else {
        z / r
    }
}

/// Frames of `x` as columns of a `win x n_frames` grid.
#[cfg(test)]
pub(crate) fn frames<T: Real>(x: &[T], cfg: &StftConfig) -> Array2<T> {
    let n = cfg.n_frames(x.len()).unwrap();
    let mut out = Array2::zeros((cfg.win_length, n));
    for t in 0..n {
        out.slice_mut(ndarray::s![.., t])
            .assign(&ndarray::ArrayView1::from(
                &x[t * cfg.hop_length..t * cfg.hop_length + cfg.win_length],
            ));
    }
    out
}
