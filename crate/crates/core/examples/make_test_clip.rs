//! Writes the synthetic test clip as a float32 WAV.
//!
//! cargo run -p melinv --example make_test_clip -- clip.wav

use melinv::io::write_wav;
use melinv::synth::test_clip;

fn main() -> melinv::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "clip.wav".into());
    write_wav(&test_clip::<f32>(), &path)?;
    println!("wrote {path}");
    Ok(())
}
