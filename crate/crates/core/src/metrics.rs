//! Spectral-convergence quality measures.

use crate::error::{Error, Result};
use crate::mel::{MelFilterbank, MelSpectrogram};
use crate::scalar::{Real, Storage};
use crate::stft::Stft;

/// Reported in place of minus infinity when the residual is exactly zero.
pub const FLOOR_DB: f64 = -999.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub scm_db: f64,
    pub sc_fullband_db: Option<f64>,
    pub objective: f64,
}

/// `20 log10(residual / reference)`, floored at [`FLOOR_DB`].
pub fn ratio_db<T: Real>(residual: T, reference: T) -> Result<T> {
    if reference <= T::zero() {
        return Err(Error::EmptyReference);
    }
    if residual <= T::zero() {
        return Ok(T::lit(FLOOR_DB));
    }
    let db = T::lit(20.0) * (residual / reference).log10();
    Ok(if db < T::lit(FLOOR_DB) {
        T::lit(FLOOR_DB)
    } else {
        db
    })
}

/// Spectral convergence on the mel-spectrogram:
/// `20 log10(||E |G(x)| - M|| / ||M||)`.
pub fn scm<T: Real>(
    x_hat: &[T],
    mel: &MelSpectrogram<T>,
    bank: &MelFilterbank<T>,
    stft: &Stft<T>,
) -> Result<T> {
    scm_with_storage(x_hat, mel, bank, stft, Storage::Native)
}

/// [`scm`] with the predicted mel-spectrogram rounded to `storage`
/// precision before it is compared with `mel`.
pub fn scm_with_storage<T: Real>(
    x_hat: &[T],
    mel: &MelSpectrogram<T>,
    bank: &MelFilterbank<T>,
    stft: &Stft<T>,
    storage: Storage,
) -> Result<T> {
    let reference = mel.norm();
    if reference <= T::zero() {
        return Err(Error::EmptyReference);
    }
    let predicted = bank.apply_mel(&stft.stft(x_hat)?.magnitude())?;
    if predicted.shape() != mel.shape() {
        return Err(Error::Dimension(format!(
            "estimate yields {:?} mel grid, reference is {:?}",
            predicted.shape(),
            mel.shape()
        )));
    }
    let residual = ndarray::Zip::from(predicted.values())
        .and(mel.values())
        .fold(T::zero(), |acc, &p, &m| {
            let d = storage.round(p) - m;
            acc + d * d
        })
        .sqrt();
    ratio_db(residual, reference)
}

/// Full-band spectral convergence against a reference signal:
/// `20 log10(|| |G(x)| - |G(r)| || / || |G(r)| ||)`. The longer signal is
/// truncated to the shorter one.
pub fn spectral_convergence_fullband<T: Real>(
    x_hat: &[T],
    x_ref: &[T],
    stft: &Stft<T>,
) -> Result<T> {
    let len = x_hat.len().min(x_ref.len());
    let est = stft.stft(&x_hat[..len])?.magnitude();
    let reference = stft.stft(&x_ref[..len])?.magnitude();
    let ref_norm = reference
        .values()
        .iter()
        .fold(T::zero(), |acc, &v| acc + v * v)
        .sqrt();
    let residual = ndarray::Zip::from(est.values())
        .and(reference.values())
        .fold(T::zero(), |acc, &a, &b| acc + (a - b) * (a - b))
        .sqrt();
    ratio_db(residual, ref_norm)
}
