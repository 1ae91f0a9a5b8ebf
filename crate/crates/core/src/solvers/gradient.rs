use ndarray::Zip;

use super::state::Problem;
use crate::error::Result;
use crate::scalar::Real;
use crate::spectrogram::norm_sqr;
use crate::spectrogram::ComplexSpectrogram;
use crate::stft::unit_phase;

/// Maximum number of times the step is halved before a descent step gives up.
pub const MAX_HALVINGS: usize = 20;

/// `½ ||E |G(x)| - M||²`.
pub fn waveform_objective<T: Real>(x: &[T], problem: &Problem<'_, T>) -> Result<T> {
    let magnitude = problem.stft.stft(x)?.magnitude();
    let residual = problem.bank.mel_residual(magnitude.values(), problem.mel)?;
    Ok(norm_sqr(&residual) * T::lit(0.5))
}

/// Objective and gradient of [`waveform_objective`]:
/// `∇ = Gᵀ((Eᵀ(E|X| - M)) ⊙ X ⊘ |X|)` with `X = G(x)` and `0 ⊘ |0| = 0`.
pub fn waveform_gradient<T: Real>(x: &[T], problem: &Problem<'_, T>) -> Result<(T, Vec<T>)> {
    let spec = problem.stft.stft(x)?;
    let magnitude = spec.magnitude();
    let residual = problem.bank.mel_residual(magnitude.values(), problem.mel)?;
    let objective = norm_sqr(&residual) * T::lit(0.5);
    let back = problem.bank.weights().t().dot(&residual);
    let weighted = Zip::from(spec.values())
        .and(&back)
        .map_collect(|&z, &r| unit_phase(z) * r);
    let gradient = problem
        .stft
        .stft_adjoint(&ComplexSpectrogram::from_raw(weighted))?;
    Ok((objective, gradient))
}

/// Initial step `1 / (σ_max(E)² · win · max Σw²)`, the reciprocal of a bound
/// on the curvature of the objective's smooth part.
pub fn default_step_size<T: Real>(problem: &Problem<'_, T>) -> f64 {
    let sigma = problem.bank.max_singular_value();
    let win = problem.stft.config().win_length() as f64;
    let overlap = problem
        .stft
        .window_square_sum(problem.n_frames().max(1))
        .iter()
        .fold(0.0f64, |m, w| m.max(w.as_f64()));
    let curvature = sigma * sigma * win * overlap;
    if curvature > 0.0 {
        1.0 / curvature
    } else {
        1.0
    }
}

/// Result of one backtracking gradient step.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentStep<T> {
    pub signal: Vec<T>,
    pub objective: T,
    /// Step length that was accepted (or the last one tried on a stall).
    pub step: T,
    /// No step length within [`MAX_HALVINGS`] halvings avoided an increase;
    /// `signal` is the input unchanged.
    pub stalled: bool,
}

/// One gradient-descent step on [`waveform_objective`] with backtracking:
/// starting from `step`, halve until the objective does not increase.
pub fn gradient_descent_step<T: Real>(
    x: &[T],
    problem: &Problem<'_, T>,
    step: T,
) -> Result<DescentStep<T>> {
    let (objective, gradient) = waveform_gradient(x, problem)?;
    let mut mu = step;
    for _ in 0..=MAX_HALVINGS {
        let candidate: Vec<T> = x.iter().zip(&gradient).map(|(&v, &g)| v - mu * g).collect();
        let f = waveform_objective(&candidate, problem)?;
        if f <= objective {
            return Ok(DescentStep {
                signal: candidate,
                objective: f,
                step: mu,
                stalled: false,
            });
        }
        mu /= T::lit(2.0);
    }
    Ok(DescentStep {
        signal: x.to_vec(),
        objective,
        step: mu * T::lit(2.0),
        stalled: true,
    })
}
