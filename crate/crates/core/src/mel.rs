//! Mel filterbank `E`, its pseudo-inverse, and the mel-domain projections.

use nalgebra::DMatrix;
use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::io::MelFile;
use crate::scalar::Real;
use crate::spectrogram::{check_shape, MagnitudeSpectrogram};
use crate::stft::StftConfig;

/// Singular values below this fraction of the largest are dropped when
/// forming the pseudo-inverse.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Mel matrix `E` (`n_mels x n_bins`) with precomputed pseudo-inverse and
/// Gram matrix. Immutable once built.
#[derive(Debug, Clone)]
pub struct MelFilterbank<T> {
    weights: Array2<T>,
    pinv: Array2<T>,
    gram: Array2<T>,
    max_singular_value: f64,
    sample_rate: u32,
    win_length: usize,
    f_min: f64,
    f_max: f64,
}

impl<T: Real> MelFilterbank<T> {
    /// Triangular filters with `n_mels + 2` breakpoints equally spaced on the
    /// mel scale between `f_min` and `f_max`, each normalized to unit area
    /// (divided by half its bandwidth in Hz).
    pub fn new(
        sample_rate: u32,
        win_length: usize,
        n_mels: usize,
        f_min: f64,
        f_max: f64,
    ) -> Result<Self> {
        if n_mels == 0 {
            return Err(Error::Config("need at least one mel bin".into()));
        }
        check_band(sample_rate, f_min, f_max)?;
        if win_length < 2 {
            return Err(Error::Config(format!(
                "window length {win_length} too short"
            )));
        }
        let n_bins = win_length / 2 + 1;
        let fft_freqs: Vec<f64> = (0..n_bins)
            .map(|k| k as f64 * sample_rate as f64 / win_length as f64)
            .collect();
        let (mel_lo, mel_hi) = (hz_to_mel(f_min), hz_to_mel(f_max));
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
            .collect();

        let mut weights = Array2::<f64>::zeros((n_mels, n_bins));
        for b in 0..n_mels {
            let (lo, center, hi) = (edges[b], edges[b + 1], edges[b + 2]);
            let norm = 2.0 / (hi - lo);
            for (k, &f) in fft_freqs.iter().enumerate() {
                let rising = (f - lo) / (center - lo);
                let falling = (hi - f) / (hi - center);
                weights[[b, k]] = rising.min(falling).max(0.0) * norm;
            }
        }
        Self::from_matrix(weights, sample_rate, win_length, f_min, f_max)
    }

    /// Wraps an arbitrary non-negative `n_mels x (win_length / 2 + 1)`
    /// matrix. Every row needs at least one positive entry.
    pub fn from_matrix(
        weights: Array2<f64>,
        sample_rate: u32,
        win_length: usize,
        f_min: f64,
        f_max: f64,
    ) -> Result<Self> {
        check_band(sample_rate, f_min, f_max)?;
        let (n_mels, n_bins) = weights.dim();
        if n_mels == 0 {
            return Err(Error::Config("need at least one mel bin".into()));
        }
        if n_bins != win_length / 2 + 1 {
            return Err(Error::Dimension(format!(
                "filterbank has {n_bins} columns, window {win_length} gives {} bins",
                win_length / 2 + 1
            )));
        }
        if let Some(((b, k), v)) = weights
            .indexed_iter()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::Validation(format!(
                "filterbank entry {v} at (mel {b}, bin {k}) is negative or non-finite"
            )));
        }
        if let Some(b) = weights
            .rows()
            .into_iter()
            .position(|r| r.iter().all(|&v| v <= 0.0))
        {
            return Err(Error::EmptyFilter(b));
        }

        let dense = DMatrix::from_fn(n_mels, n_bins, |r, c| weights[[r, c]]);
        let svd = dense.svd(true, true);
        let max_singular_value = svd.singular_values.max();
        let pinv = svd
            .pseudo_inverse(PINV_RELATIVE_CUTOFF * max_singular_value)
            .map_err(|e| Error::Validation(format!("pseudo-inverse failed: {e}")))?;
        let pinv = Array2::from_shape_fn((n_bins, n_mels), |(r, c)| T::lit(pinv[(r, c)]));
        let gram = weights.t().dot(&weights).mapv(T::lit);

        Ok(Self {
            weights: weights.mapv(T::lit),
            pinv,
            gram,
            max_singular_value,
            sample_rate,
            win_length,
            f_min,
            f_max,
        })
    }

    /// Filterbank matching the header of a mel file.
    pub fn for_file(file: &MelFile) -> Result<Self> {
        let n_bins = file.win_length as usize / 2 + 1;
        if file.n_mels as usize > n_bins {
            return Err(Error::Config(format!(
                "{} mel bins exceed {n_bins} frequency bins",
                file.n_mels
            )));
        }
        Self::new(
            file.sample_rate,
            file.win_length as usize,
            file.n_mels as usize,
            file.f_min as f64,
            file.f_max as f64,
        )
    }

    pub fn n_mels(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &Array2<T> {
        &self.weights
    }

    pub fn pinv(&self) -> &Array2<T> {
        &self.pinv
    }

    pub fn gram(&self) -> &Array2<T> {
        &self.gram
    }

    /// Largest singular value of `E`, from the SVD computed at construction.
    pub fn max_singular_value(&self) -> f64 {
        self.max_singular_value
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn win_length(&self) -> usize {
        self.win_length
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    fn check_rows(&self, what: &str, rows: usize) -> Result<()> {
        if rows != self.n_bins() {
            return Err(Error::Dimension(format!(
                "{what}: expected {} frequency bins, found {rows}",
                self.n_bins()
            )));
        }
        Ok(())
    }

    fn check_mel(&self, mel: &MelSpectrogram<T>, n_frames: usize) -> Result<()> {
        check_shape("mel-spectrogram", (self.n_mels(), n_frames), mel.shape())
    }

    /// `E * A`.
    pub fn apply_mel(&self, magnitude: &MagnitudeSpectrogram<T>) -> Result<MelSpectrogram<T>> {
        self.check_rows("magnitude", magnitude.n_bins())?;
        Ok(MelSpectrogram {
            values: self.weights.dot(magnitude.values()),
        })
    }

    /// `E Y - M` for an arbitrary real grid.
    pub fn mel_residual(&self, y: &Array2<T>, mel: &MelSpectrogram<T>) -> Result<Array2<T>> {
        self.check_rows("grid", y.nrows())?;
        self.check_mel(mel, y.ncols())?;
        Ok(self.weights.dot(y) - mel.values())
    }

    /// Projection onto the affine set `{Z : E Z = M}`: `Y - E†(E Y - M)`.
    /// The result may have negative entries.
    pub fn project_affine_mel(&self, y: &Array2<T>, mel: &MelSpectrogram<T>) -> Result<Array2<T>> {
        let residual = self.mel_residual(y, mel)?;
        Ok(y - &self.pinv.dot(&residual))
    }

    /// Squared distance from `y` to the affine set `{Z : E Z = M}`.
    pub fn distance_sqr_to_mel_set(&self, y: &Array2<T>, mel: &MelSpectrogram<T>) -> Result<T> {
        let residual = self.mel_residual(y, mel)?;
        let step = self.pinv.dot(&residual);
        Ok(step.iter().fold(T::zero(), |acc, &v| acc + v * v))
    }

    /// `E† M`.
    pub fn pinv_apply(&self, mel: &MelSpectrogram<T>) -> Result<Array2<T>> {
        if mel.n_mels() != self.n_mels() {
            return Err(Error::Dimension(format!(
                "mel-spectrogram has {} bins, filterbank {}",
                mel.n_mels(),
                self.n_mels()
            )));
        }
        Ok(self.pinv.dot(mel.values()))
    }

    /// `G Y` with `G = EᵀE`.
    pub fn gram_apply(&self, y: &Array2<T>) -> Result<Array2<T>> {
        self.check_rows("grid", y.nrows())?;
        if self.n_mels() < self.n_bins() {
            // Cheaper through the factors when E is wide.
            Ok(self.weights.t().dot(&self.weights.dot(y)))
        } else {
            Ok(self.gram.dot(y))
        }
    }

    /// `v = Eᵀ M`.
    pub fn mel_backproject(&self, mel: &MelSpectrogram<T>) -> Result<Array2<T>> {
        if mel.n_mels() != self.n_mels() {
            return Err(Error::Dimension(format!(
                "mel-spectrogram has {} bins, filterbank {}",
                mel.n_mels(),
                self.n_mels()
            )));
        }
        Ok(self.weights.t().dot(mel.values()))
    }

    /// Header for a mel file produced with this filterbank.
    pub fn to_file(&self, mel: &MelSpectrogram<T>, stft: &StftConfig) -> Result<MelFile> {
        if stft.win_length() != self.win_length {
            return Err(Error::Config(format!(
                "STFT window {} does not match filterbank window {}",
                stft.win_length(),
                self.win_length
            )));
        }
        let file = MelFile {
            n_mels: self.n_mels() as u32,
            n_frames: mel.n_frames() as u32,
            sample_rate: self.sample_rate,
            win_length: self.win_length as u32,
            hop_length: stft.hop_length() as u32,
            f_min: self.f_min as f32,
            f_max: self.f_max as f32,
            data: mel.values().iter().map(|v| v.as_f32()).collect(),
        };
        file.validate()?;
        Ok(file)
    }
}

fn check_band(sample_rate: u32, f_min: f64, f_max: f64) -> Result<()> {
    if sample_rate == 0 {
        return Err(Error::Config("sample rate must be positive".into()));
    }
    let nyquist = sample_rate as f64 / 2.0;
    if !(f_min >= 0.0 && f_min < f_max && f_max <= nyquist) {
        return Err(Error::Config(format!(
            "need 0 <= f_min < f_max <= {nyquist}, got [{f_min}, {f_max}]"
        )));
    }
    Ok(())
}

/// Projection onto the non-negative orthant: entrywise `max(y, 0)`.
pub fn project_nonneg<T: Real>(y: &Array2<T>) -> MagnitudeSpectrogram<T> {
    MagnitudeSpectrogram::from_raw(y.mapv(|v| if v > T::zero() { v } else { T::zero() }))
}

/// Non-negative `n_mels x n_frames` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram<T> {
    values: Array2<T>,
}

impl<T: Real> MelSpectrogram<T> {
    pub fn new(values: Array2<T>) -> Result<Self> {
        if let Some(((b, t), v)) = values
            .indexed_iter()
            .find(|(_, v)| !(v.is_finite() && **v >= T::zero()))
        {
            return Err(Error::Validation(format!(
                "mel entry {v} at (bin {b}, frame {t}) is negative or non-finite"
            )));
        }
        Ok(Self { values })
    }

    pub fn from_file(file: &MelFile) -> Result<Self> {
        file.validate()?;
        let shape = (file.n_mels as usize, file.n_frames as usize);
        let values =
            Array2::from_shape_vec(shape, file.data.iter().map(|&v| T::lit(v as f64)).collect())
                .map_err(|e| Error::Format(e.to_string()))?;
        Ok(Self { values })
    }

    pub fn n_mels(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn values(&self) -> &Array2<T> {
        &self.values
    }

    pub fn norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    /// Frobenius distance to another mel grid of the same shape.
    pub fn distance(&self, other: &Self) -> T {
        Zip::from(&self.values)
            .and(&other.values)
            .fold(T::zero(), |acc, &a, &b| acc + (a - b) * (a - b))
            .sqrt()
    }
}

impl MelFile {
    pub fn stft_config(&self) -> Result<StftConfig> {
        StftConfig::new(self.win_length as usize, self.hop_length as usize)
    }
}
