//! Scalar abstraction shared by every numeric routine in the crate.

use ndarray::NdFloat;
use num_traits::{FloatConst, FromPrimitive};
use realfft::FftNum;

/// Floating-point type the analysis and solver code is generic over.
///
/// Implemented for `f32` and `f64`. The CLI and the reference tests use
/// `f64`; the iterative solvers accumulate rounding error over hundreds of
/// iterations and single precision is only suitable for quick previews.
pub trait Real: NdFloat + FftNum + FloatConst + FromPrimitive + Default {
    /// Converts an `f64` literal. Never fails for the supported types.
    fn lit(v: f64) -> Self;

    fn as_f64(self) -> f64;

    fn as_f32(self) -> f32;
}

impl Real for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn as_f32(self) -> f32 {
        self
    }
}

impl Real for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }

    #[inline]
    fn as_f32(self) -> f32 {
        self as f32
    }
}

/// Precision at which signals and mel-spectrograms are stored outside the
/// solver.
///
/// Files carry 32-bit floats. With [`Storage::F32`], output signals are
/// rounded to `f32` before they are re-analyzed, and predicted mel values are
/// rounded to `f32` before being compared with a reference read from disk, so
/// that numbers reported in memory match what a later evaluation of the
/// written files computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Storage {
    #[default]
    Native,
    F32,
}

impl Storage {
    #[inline]
    pub fn round<T: Real>(self, v: T) -> T {
        match self {
            Storage::Native => v,
            Storage::F32 => T::lit(v.as_f32() as f64),
        }
    }

    pub fn round_all<T: Real>(self, values: &mut [T]) {
        if self == Storage::F32 {
            values.iter_mut().for_each(|v| *v = self.round(*v));
        }
    }
}
