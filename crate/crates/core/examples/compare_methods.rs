//! Inverts the mel-spectrogram of the synthetic test clip with every method
//! and prints the final SCM of each.
//!
//! cargo run --release -p melinv --example compare_methods [iterations]

use melinv::solvers::{run, Method, Problem, SolverConfig};
use melinv::synth::test_clip;
use melinv::{MelFilterbank, Stft, StftConfig};

fn main() -> melinv::Result<()> {
    let iterations = std::env::args()
        .nth(1)
        .map_or(500, |s| s.parse().expect("iteration count"));
    let clip = test_clip::<f64>();
    let stft = Stft::new(StftConfig::new(1024, 256)?);
    let bank = MelFilterbank::new(
        clip.sample_rate(),
        1024,
        80,
        0.0,
        clip.sample_rate() as f64 / 2.0,
    )?;
    let mel = bank.apply_mel(&stft.stft(clip.samples())?.magnitude())?;
    let problem = Problem::new(&mel, &bank, &stft)?;
    for method in Method::ALL {
        let mut cfg = SolverConfig::new(method);
        cfg.iterations = iterations;
        let start = std::time::Instant::now();
        let out = run(&problem, &cfg)?;
        let last = out.trace.last().expect("trace has an initial row");
        println!(
            "{:<13} scm_db={:>9.3} objective={:.6e} ({:.1?}){}",
            method.name(),
            last.scm_db,
            last.objective,
            start.elapsed(),
            if out.stalled { " stalled" } else { "" }
        );
    }
    Ok(())
}
