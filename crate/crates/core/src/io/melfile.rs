use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MEL_MAGIC: &[u8; 4] = b"MEL1";
pub const MEL_HEADER_LEN: usize = 32;

/// Mel-spectrogram together with the analysis settings needed to invert it.
///
/// On disk (little-endian): magic `MEL1`, five `u32` (`n_mels`, `n_frames`,
/// `sample_rate`, `win_length`, `hop_length`), two `f32` (`f_min`, `f_max`),
/// then `n_mels * n_frames` `f32` values in row-major order (one row per mel
/// bin).
#[derive(Debug, Clone, PartialEq)]
pub struct MelFile {
    pub n_mels: u32,
    pub n_frames: u32,
    pub sample_rate: u32,
    pub win_length: u32,
    pub hop_length: u32,
    pub f_min: f32,
    pub f_max: f32,
    pub data: Vec<f32>,
}

impl MelFile {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.n_mels == 0 || self.n_frames == 0 {
            return bad(format!(
                "empty grid ({} mel bins x {} frames)",
                self.n_mels, self.n_frames
            ));
        }
        if self.sample_rate == 0 {
            return bad("sample rate must be positive".into());
        }
        if self.hop_length == 0 || self.win_length < self.hop_length {
            return bad(format!(
                "need 1 <= hop_length <= win_length, got hop {} win {}",
                self.hop_length, self.win_length
            ));
        }
        let nyquist = self.sample_rate as f32 / 2.0;
        if !(self.f_min >= 0.0 && self.f_min < self.f_max && self.f_max <= nyquist) {
            return bad(format!(
                "need 0 <= f_min < f_max <= {nyquist}, got [{}, {}]",
                self.f_min, self.f_max
            ));
        }
        let expected = self.n_mels as usize * self.n_frames as usize;
        if self.data.len() != expected {
            return bad(format!(
                "expected B·T values ({}·{} = {expected}), found {}",
                self.n_mels,
                self.n_frames,
                self.data.len()
            ));
        }
        if let Some(i) = self.data.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad(format!(
                "mel entry {} at (bin {}, frame {}) is negative or non-finite",
                self.data[i],
                i / self.n_frames as usize,
                i % self.n_frames as usize
            ));
        }
        Ok(())
    }

    /// Size in bytes of the encoded file.
    pub fn encoded_len(&self) -> usize {
        MEL_HEADER_LEN + 4 * self.data.len()
    }
}

pub fn write_mel_to<W: Write>(mel: &MelFile, mut w: W) -> Result<()> {
    mel.validate()?;
    w.write_all(MEL_MAGIC)?;
    for v in [
        mel.n_mels,
        mel.n_frames,
        mel.sample_rate,
        mel.win_length,
        mel.hop_length,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&mel.f_min.to_le_bytes())?;
    w.write_all(&mel.f_max.to_le_bytes())?;
    for v in &mel.data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mel<P: AsRef<Path>>(mel: &MelFile, path: P) -> Result<()> {
    write_mel_to(mel, BufWriter::new(File::create(path)?))
}

pub fn read_mel_from<R: Read>(mut r: R) -> Result<MelFile> {
    let mut header = [0u8; MEL_HEADER_LEN];
    r.read_exact(&mut header).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated header".into()),
        _ => Error::Io(e),
    })?;
    if &header[..4] != MEL_MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected \"MEL1\"",
            String::from_utf8_lossy(&header[..4])
        )));
    }
    let word = |i: usize| -> [u8; 4] { header[4 + 4 * i..8 + 4 * i].try_into().unwrap() };
    let n_mels = u32::from_le_bytes(word(0));
    let n_frames = u32::from_le_bytes(word(1));
    let sample_rate = u32::from_le_bytes(word(2));
    let win_length = u32::from_le_bytes(word(3));
    let hop_length = u32::from_le_bytes(word(4));
    let f_min = f32::from_le_bytes(word(5));
    let f_max = f32::from_le_bytes(word(6));

    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    let expected = n_mels as usize * n_frames as usize;
    if payload.len() != 4 * expected {
        return Err(Error::Format(format!(
            "expected B·T values ({n_mels}·{n_frames} = {expected}), payload holds {} bytes",
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();

    let mel = MelFile {
        n_mels,
        n_frames,
        sample_rate,
        win_length,
        hop_length,
        f_min,
        f_max,
        data,
    };
    mel.validate()?;
    Ok(mel)
}

pub fn read_mel<P: AsRef<Path>>(path: P) -> Result<MelFile> {
    read_mel_from(BufReader::new(File::open(path)?))
}
