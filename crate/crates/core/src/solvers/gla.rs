use super::state::RunState;
use crate::error::Result;
use crate::scalar::Real;
use crate::spectrogram::{ComplexSpectrogram, MagnitudeSpectrogram};
use crate::stft::{project_magnitude, Stft};

/// `|| |X| - A ||²`.
pub fn magnitude_loss<T: Real>(x: &ComplexSpectrogram<T>, target: &MagnitudeSpectrogram<T>) -> T {
    ndarray::Zip::from(x.values())
        .and(target.values())
        .fold(T::zero(), |acc, z, &a| {
            let d = z.norm() - a;
            acc + d * d
        })
}

/// One Griffin-Lim iteration by alternating projections:
/// `X ← P_C(P_A(X))`.
pub fn gla_step<T: Real>(
    state: &mut RunState<T>,
    stft: &Stft<T>,
    target: &MagnitudeSpectrogram<T>,
) -> Result<()> {
    let next = stft.project_consistency(&project_magnitude(&state.x, target)?)?;
    state.x_prev = std::mem::replace(&mut state.x, next);
    state.iteration += 1;
    Ok(())
}

/// One Griffin-Lim iteration written as projected gradient descent on
/// `|| |X| - A ||²`: `X ← P_C(X - μ (X - P_A(X)))`. Identical to
/// [`gla_step`] for `μ = 1`.
pub fn gla_step_projected_gradient<T: Real>(
    state: &mut RunState<T>,
    stft: &Stft<T>,
    target: &MagnitudeSpectrogram<T>,
    step: T,
) -> Result<()> {
    let projected = project_magnitude(&state.x, target)?;
    let moved = ndarray::Zip::from(state.x.values())
        .and(projected.values())
        .map_collect(|&x, &p| {
            let gradient = x - p;
            x - gradient * step
        });
    let next = stft.project_consistency(&ComplexSpectrogram::new(moved)?)?;
    state.x_prev = std::mem::replace(&mut state.x, next);
    state.iteration += 1;
    Ok(())
}

/// One fast Griffin-Lim iteration: extrapolate
/// `X̲ = X + α (X - X_prev)`, then `X ← P_C(P_A(X̲))`.
pub fn fgla_step<T: Real>(
    state: &mut RunState<T>,
    stft: &Stft<T>,
    target: &MagnitudeSpectrogram<T>,
    alpha: T,
) -> Result<()> {
    let extrapolated = state.x.extrapolate(&state.x_prev, alpha);
    let next = stft.project_consistency(&project_magnitude(&extrapolated, target)?)?;
    state.x_prev = std::mem::replace(&mut state.x, next);
    state.iteration += 1;
    Ok(())
}
