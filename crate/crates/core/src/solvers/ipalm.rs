use ndarray::Zip;

use super::state::{Problem, RunState};
use crate::error::Result;
use crate::mel::project_nonneg;
use crate::scalar::Real;
use crate::spectrogram::norm_sqr;
use crate::spectrogram::{ComplexSpectrogram, MagnitudeSpectrogram};
use crate::stft::project_magnitude;

use super::gla::magnitude_loss;

/// `½ || |X| - Y ||² + (λ/2) d_M(Y)²`.
pub fn propfull_objective<T: Real>(
    x: &ComplexSpectrogram<T>,
    y: &MagnitudeSpectrogram<T>,
    problem: &Problem<'_, T>,
    lambda: T,
) -> Result<T> {
    let half = T::lit(0.5);
    let distance = problem
        .bank
        .distance_sqr_to_mel_set(y.values(), problem.mel)?;
    Ok(half * magnitude_loss(x, y) + half * lambda * distance)
}

/// `½ || |X| - Y ||² + (λ/2) ||E Y - M||²`.
pub fn propmel_objective<T: Real>(
    x: &ComplexSpectrogram<T>,
    y: &MagnitudeSpectrogram<T>,
    problem: &Problem<'_, T>,
    lambda: T,
) -> Result<T> {
    let half = T::lit(0.5);
    let residual = problem.bank.mel_residual(y.values(), problem.mel)?;
    let mel_term = norm_sqr(&residual);
    Ok(half * magnitude_loss(x, y) + half * lambda * mel_term)
}

/// Entry of the distance-to-set Z update: `(|X| + λ P_M(Y)) / (1 + λ)`.
#[inline]
pub(crate) fn propfull_update<T: Real>(magnitude: T, projected: T, lambda: T) -> T {
    let tau2 = T::one() + lambda;
    magnitude / tau2 + lambda / tau2 * projected
}

/// Entry of the mel-domain Z update: `Y - (Y - |X| + λ(GY) - λv) / (1 + λ)`.
#[inline]
pub(crate) fn propmel_update<T: Real>(y: T, magnitude: T, gram_y: T, v: T, lambda: T) -> T {
    y - (y - magnitude + lambda * gram_y - lambda * v) / (T::one() + lambda)
}

/// Shared X block: `X̲ = X + α(X - X_prev)`, `X ← P_C(P_Y(X̲))`.
fn phase_block<T: Real>(state: &mut RunState<T>, problem: &Problem<'_, T>, alpha: T) -> Result<()> {
    let extrapolated = state.x.extrapolate(&state.x_prev, alpha);
    let next = problem
        .stft
        .project_consistency(&project_magnitude(&extrapolated, &state.y)?)?;
    state.x_prev = std::mem::replace(&mut state.x, next);
    Ok(())
}

/// One iPALM iteration for the distance-to-set formulation:
///
/// ```text
/// X̲ = X + α (X - X_prev);  X_prev = X
/// X = P_C(P_Y(X̲))
/// Z = |X| / (1 + λ) + λ / (1 + λ) · P_M(Y)
/// Y = P_N(Z)
/// ```
pub fn ipalm_propfull_step<T: Real>(
    state: &mut RunState<T>,
    problem: &Problem<'_, T>,
    lambda: T,
    alpha: T,
) -> Result<()> {
    phase_block(state, problem, alpha)?;
    let projected = problem
        .bank
        .project_affine_mel(state.y.values(), problem.mel)?;
    state.z = Zip::from(state.x.values())
        .and(&projected)
        .map_collect(|x, &p| propfull_update(x.norm(), p, lambda));
    state.y = project_nonneg(&state.z);
    state.iteration += 1;
    Ok(())
}

/// One iPALM iteration for the mel-domain formulation. The X block matches
/// [`ipalm_propfull_step`]; the Y block takes a gradient step of length
/// `1 / (1 + λ)` on `½||Y - |X|||² + (λ/2)||E Y - M||²`:
///
/// ```text
/// Z = Y - (Y - |X| + λ G Y - λ v) / (1 + λ),   G = EᵀE, v = EᵀM
/// Y = P_N(Z)
/// ```
pub fn ipalm_propmel_step<T: Real>(
    state: &mut RunState<T>,
    problem: &Problem<'_, T>,
    lambda: T,
    alpha: T,
) -> Result<()> {
    phase_block(state, problem, alpha)?;
    let gy = problem.bank.gram_apply(state.y.values())?;
    state.z = Zip::from(state.y.values())
        .and(state.x.values())
        .and(&gy)
        .and(problem.backprojection())
        .map_collect(|&y, x, &g, &v| propmel_update(y, x.norm(), g, v, lambda));
    state.y = project_nonneg(&state.z);
    state.iteration += 1;
    Ok(())
}
