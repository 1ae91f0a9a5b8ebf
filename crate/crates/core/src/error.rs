use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported encoding: {0}")]
    Unsupported(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty signal")]
    EmptySignal,

    #[error("signal shorter than one window ({len} < {win_length} samples)")]
    SignalTooShort { len: usize, win_length: usize },

    #[error("empty mel filter at bin {0}")]
    EmptyFilter(usize),

    #[error("empty reference: norm of the reference spectrogram is zero")]
    EmptyReference,
}

impl From<hound::Error> for Error {
    fn from(e: hound::Error) -> Self {
        match e {
            hound::Error::IoError(io) => Error::Io(io),
            hound::Error::Unsupported => Error::Unsupported("wav encoding".into()),
            hound::Error::FormatError(msg) => Error::Format(msg.to_string()),
            other => Error::Format(other.to_string()),
        }
    }
}
