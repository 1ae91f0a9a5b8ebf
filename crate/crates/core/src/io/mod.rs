//! File formats: WAV audio, the binary mel-spectrogram container, and the
//! per-iteration trace CSV.

mod melfile;
mod trace;
mod wav;

pub use melfile::{
    read_mel, read_mel_from, write_mel, write_mel_to, MelFile, MEL_HEADER_LEN, MEL_MAGIC,
};
pub use trace::{write_trace, write_trace_to, TraceRow};
pub use wav::{read_wav, write_wav};
