use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use melinv::solvers::{InitPhase, Method};

#[derive(Debug, Parser)]
#[command(
    name = "melinv",
    version,
    about = "Reconstruct audio from mel-spectrograms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the mel-spectrogram of a WAV file.
    Melspec(MelspecArgs),
    /// Reconstruct a waveform from a mel file.
    Invert(InvertArgs),
    /// Score an estimate against a mel file (and optionally a reference WAV).
    Eval(EvalArgs),
    /// Run one inversion per grid point and tabulate the final SCM.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct MelspecArgs {
    /// Input WAV (PCM16 or float32).
    #[arg(long)]
    pub input: PathBuf,
    /// Output mel file.
    #[arg(long)]
    pub output: PathBuf,
    /// Window length in samples (even).
    #[arg(long, default_value_t = 1024)]
    pub win: usize,
    /// Hop length in samples; must divide the window.
    #[arg(long, default_value_t = 256)]
    pub hop: usize,
    /// Number of mel bins.
    #[arg(long, default_value_t = 80)]
    pub mels: usize,
    /// Lowest filter edge in Hz.
    #[arg(long, default_value_t = 0.0)]
    pub fmin: f64,
    /// Highest filter edge in Hz [default: half the sample rate].
    #[arg(long)]
    pub fmax: Option<f64>,
}

/// Options shared by `invert` and `sweep`.
#[derive(Debug, Args)]
pub struct SolverArgs {
    /// gla, fgla, gd, prop-mel, prop-full, cascade-gla or cascade-fgla.
    #[arg(long, default_value = "prop-full")]
    pub method: Method,
    /// Number of iterations.
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    /// Initial phase.
    #[arg(long, default_value = "zero", value_parser = parse_init)]
    pub init: InitPhase,
    /// Seed of the random initial phase (requires --init random).
    #[arg(long)]
    pub seed: Option<u64>,
    /// NNLS iterations of the cascaded methods [default: 1000].
    #[arg(long)]
    pub nnls_iters: Option<usize>,
    /// Initial step of gradient descent [default: derived from the operators].
    #[arg(long)]
    pub mu: Option<f64>,
}

fn parse_init(s: &str) -> Result<InitPhase, melinv::Error> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Input mel file.
    #[arg(long)]
    pub mel: PathBuf,
    /// Output WAV (float32).
    #[arg(long)]
    pub output: PathBuf,
    /// Per-iteration CSV `iter,scm_db,objective`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Mel fidelity weight (prop-mel, prop-full) [default: 10].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Inertia (fgla, prop-mel, prop-full, cascade-fgla) [default: 0.9].
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Estimated signal.
    #[arg(long)]
    pub input: PathBuf,
    /// Mel file the estimate should reproduce.
    #[arg(long)]
    pub mel: PathBuf,
    /// Reference signal for full-band spectral convergence.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Input mel file.
    #[arg(long)]
    pub mel: PathBuf,
    /// Output CSV [default: standard output].
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated mel fidelity weights.
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Comma-separated inertia values.
    #[arg(long)]
    pub alphas: Option<String>,
}
