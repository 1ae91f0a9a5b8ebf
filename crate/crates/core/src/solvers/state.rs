use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{InitPhase, SolverConfig};
use crate::error::{Error, Result};
use crate::mel::{project_nonneg, MelFilterbank, MelSpectrogram};
use crate::scalar::Real;
use crate::spectrogram::{ComplexSpectrogram, MagnitudeSpectrogram};
use crate::stft::Stft;

/// The fixed inputs of one inversion: target mel-spectrogram `M`, the mel
/// matrix `E`, and the STFT operator.
#[derive(Debug, Clone)]
pub struct Problem<'a, T: Real> {
    pub mel: &'a MelSpectrogram<T>,
    pub bank: &'a MelFilterbank<T>,
    pub stft: &'a Stft<T>,
    backprojection: Array2<T>,
}

impl<'a, T: Real> Problem<'a, T> {
    pub fn new(
        mel: &'a MelSpectrogram<T>,
        bank: &'a MelFilterbank<T>,
        stft: &'a Stft<T>,
    ) -> Result<Self> {
        if bank.win_length() != stft.config().win_length() {
            return Err(Error::Config(format!(
                "filterbank built for window {}, STFT uses {}",
                bank.win_length(),
                stft.config().win_length()
            )));
        }
        if mel.n_mels() != bank.n_mels() {
            return Err(Error::Dimension(format!(
                "mel-spectrogram has {} bins, filterbank {}",
                mel.n_mels(),
                bank.n_mels()
            )));
        }
        let backprojection = bank.mel_backproject(mel)?;
        Ok(Self {
            mel,
            bank,
            stft,
            backprojection,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.mel.n_frames()
    }

    pub fn signal_len(&self) -> usize {
        self.stft.config().signal_len(self.n_frames())
    }

    /// `v = Eᵀ M`, computed once.
    pub fn backprojection(&self) -> &Array2<T> {
        &self.backprojection
    }
}

/// Iterates of the joint solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunState<T> {
    /// `X^[k-1]`.
    pub x_prev: ComplexSpectrogram<T>,
    /// `X^[k]`; consistent after every full iteration.
    pub x: ComplexSpectrogram<T>,
    /// `Y^[k]`; non-negative.
    pub y: MagnitudeSpectrogram<T>,
    /// `Z^[k-1]`, the Y-block gradient step before projection.
    pub z: Array2<T>,
    /// Number of completed iterations.
    pub iteration: usize,
}

/// `Y⁰ = P_N(E† M)`, `X⁰ = P_C(Y⁰ e^{iφ})`, `X⁻¹ = X⁰`.
pub fn init_state<T: Real>(problem: &Problem<'_, T>, cfg: &SolverConfig) -> Result<RunState<T>> {
    let y = project_nonneg(&problem.bank.pinv_apply(problem.mel)?);
    init_state_with_magnitude(problem.stft, y, cfg)
}

/// Initial state built around a given magnitude estimate.
pub fn init_state_with_magnitude<T: Real>(
    stft: &Stft<T>,
    magnitude: MagnitudeSpectrogram<T>,
    cfg: &SolverConfig,
) -> Result<RunState<T>> {
    if magnitude.n_bins() != stft.n_bins() {
        return Err(Error::Dimension(format!(
            "magnitude has {} bins, STFT {}",
            magnitude.n_bins(),
            stft.n_bins()
        )));
    }
    let phase = match cfg.init {
        InitPhase::Zero => Array2::zeros(magnitude.shape()),
        InitPhase::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let two_pi = 2.0 * std::f64::consts::PI;
            Array2::from_shape_simple_fn(magnitude.shape(), || T::lit(rng.random::<f64>() * two_pi))
        }
    };
    let x = stft.project_consistency(&ComplexSpectrogram::from_polar(&magnitude, &phase)?)?;
    Ok(RunState {
        x_prev: x.clone(),
        x,
        z: magnitude.values().clone(),
        y: magnitude,
        iteration: 0,
    })
}
