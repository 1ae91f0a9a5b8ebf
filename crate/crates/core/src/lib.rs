//! Audio reconstruction from mel-spectrograms.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

pub mod error;
pub mod io;
pub mod mel;
pub mod metrics;
pub mod scalar;
pub mod signal;
pub mod solvers;
pub mod spectrogram;
pub mod stft;
pub mod synth;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use mel::{MelFilterbank, MelSpectrogram};
pub use scalar::{Real, Storage};
pub use signal::Signal;
pub use spectrogram::{ComplexSpectrogram, MagnitudeSpectrogram};
pub use stft::{Stft, StftConfig};

pub type SignalF64 = Signal<f64>;
pub type SignalF32 = Signal<f32>;
pub type StftF64 = Stft<f64>;
pub type StftF32 = Stft<f32>;
pub type ComplexSpectrogramF64 = ComplexSpectrogram<f64>;
pub type ComplexSpectrogramF32 = ComplexSpectrogram<f32>;
pub type MagnitudeSpectrogramF64 = MagnitudeSpectrogram<f64>;
pub type MagnitudeSpectrogramF32 = MagnitudeSpectrogram<f32>;
pub type MelFilterbankF64 = MelFilterbank<f64>;
pub type MelFilterbankF32 = MelFilterbank<f32>;
pub type MelSpectrogramF64 = MelSpectrogram<f64>;
pub type MelSpectrogramF32 = MelSpectrogram<f32>;
pub type RunStateF64 = solvers::RunState<f64>;
pub type RunStateF32 = solvers::RunState<f32>;
