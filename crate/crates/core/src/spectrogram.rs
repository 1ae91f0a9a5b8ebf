//! Time-frequency grids. Rows are frequency (or mel) bins, columns are
//! frames.

use ndarray::{Array2, Zip};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex STFT coefficients, `n_bins x n_frames`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram<T> {
    values: Array2<Complex<T>>,
}

impl<T: Real> ComplexSpectrogram<T> {
    pub fn new(values: Array2<Complex<T>>) -> Result<Self> {
        if let Some(((f, t), _)) = values
            .indexed_iter()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Validation(format!(
                "non-finite STFT coefficient at (bin {f}, frame {t})"
            )));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_raw(values: Array2<Complex<T>>) -> Self {
        Self { values }
    }

    pub fn zeros(n_bins: usize, n_frames: usize) -> Self {
        Self {
            values: Array2::from_elem((n_bins, n_frames), Complex::new(T::zero(), T::zero())),
        }
    }

    /// Magnitudes combined with the given phases (radians).
    pub fn from_polar(magnitude: &MagnitudeSpectrogram<T>, phase: &Array2<T>) -> Result<Self> {
        check_shape("phase", magnitude.shape(), phase.dim())?;
        let values = Zip::from(magnitude.values())
            .and(phase)
            .map_collect(|&m, &p| Complex::from_polar(m, p));
        Self::new(values)
    }

    pub fn n_bins(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn values(&self) -> &Array2<Complex<T>> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex<T>> {
        self.values
    }

    pub fn magnitude(&self) -> MagnitudeSpectrogram<T> {
        MagnitudeSpectrogram {
            values: self.values.mapv(|z| z.norm()),
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Squared Frobenius distance to `other`.
    pub fn distance_sqr(&self, other: &Self) -> T {
        Zip::from(&self.values)
            .and(&other.values)
            .fold(T::zero(), |acc, a, b| acc + (a - b).norm_sqr())
    }

    /// Inertial extrapolation `self + alpha * (self - previous)`.
    pub fn extrapolate(&self, previous: &Self, alpha: T) -> Self {
        if alpha == T::zero() {
            return self.clone();
        }
        let values = Zip::from(&self.values)
            .and(&previous.values)
            .map_collect(|&x, &p| x + (x - p) * alpha);
        Self { values }
    }
}

/// Non-negative real grid: full-band magnitudes (`n_bins x n_frames`).
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSpectrogram<T> {
    values: Array2<T>,
}

impl<T: Real> MagnitudeSpectrogram<T> {
    /// Fails on any negative or non-finite entry.
    pub fn new(values: Array2<T>) -> Result<Self> {
        if let Some(((f, t), v)) = values
            .indexed_iter()
            .find(|(_, v)| !(v.is_finite() && **v >= T::zero()))
        {
            return Err(Error::Validation(format!(
                "magnitude entry {v} at (bin {f}, frame {t}) is negative or non-finite"
            )));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_raw(values: Array2<T>) -> Self {
        Self { values }
    }

    pub fn zeros(n_bins: usize, n_frames: usize) -> Self {
        Self {
            values: Array2::zeros((n_bins, n_frames)),
        }
    }

    pub fn n_bins(&self) -> usize {
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

    pub fn into_values(self) -> Array2<T> {
        self.values
    }
}

pub(crate) fn check_shape(
    what: &str,
    expected: (usize, usize),
    found: (usize, usize),
) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension(format!(
            "{what}: expected {}x{}, found {}x{}",
            expected.0, expected.1, found.0, found.1
        )));
    }
    Ok(())
}

/// Squared Frobenius norm of a real grid.
pub(crate) fn norm_sqr<T: Real>(a: &Array2<T>) -> T {
    a.iter().fold(T::zero(), |acc, &v| acc + v * v)
}
