use crate::error::{Error, Result};
use crate::scalar::Real;

/// Mono time-domain waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    samples: Vec<T>,
    sample_rate: u32,
}

impl<T: Real> Signal<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Validation("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Validation(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn silence(len: usize, sample_rate: u32) -> Result<Self> {
        Self::new(vec![T::zero(); len], sample_rate)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn cast<U: Real>(&self) -> Signal<U> {
        Signal {
            samples: self.samples.iter().map(|s| U::lit(s.as_f64())).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

impl<T> AsRef<[T]> for Signal<T> {
    fn as_ref(&self) -> &[T] {
        &self.samples
    }
}
