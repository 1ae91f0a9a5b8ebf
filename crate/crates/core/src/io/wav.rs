use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Signal;

/// Reads a PCM16 or IEEE-float32 WAV file. Multichannel input is averaged to
/// mono; PCM16 is scaled by 1/32768.
pub fn read_wav<T: Real, P: AsRef<Path>>(path: P) -> Result<Signal<T>> {
    let mut reader = WavReader::open(path)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::Format("zero channels".into()));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<Result<_, _>>()?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<Result<_, _>>()?,
        (fmt, bits) => {
            return Err(Error::Unsupported(format!(
                "{bits}-bit {fmt:?} samples (expected 16-bit PCM or 32-bit float)"
            )))
        }
    };
    if interleaved.is_empty() {
        return Err(Error::EmptySignal);
    }

    let samples = if channels == 1 {
        interleaved.into_iter().map(T::lit).collect()
    } else {
        interleaved
            .chunks(channels)
            .map(|frame| T::lit(frame.iter().sum::<f64>() / channels as f64))
            .collect()
    };
    Signal::new(samples, spec.sample_rate)
}

/// Writes a mono IEEE-float32 WAV file. Samples are not clipped or
/// normalized.
pub fn write_wav<T: Real, P: AsRef<Path>>(signal: &Signal<T>, path: P) -> Result<()> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec)?;
    for &s in signal.samples() {
        writer.write_sample(s.as_f32())?;
    }
    writer.finalize()?;
    Ok(())
}
