use ndarray::Array2;
use num_traits::Float;

use crate::error::Result;
use crate::mel::{project_nonneg, MelFilterbank, MelSpectrogram};
use crate::scalar::Real;
use crate::spectrogram::norm_sqr;
use crate::spectrogram::MagnitudeSpectrogram;

const POWER_ITERATIONS: usize = 1000;
const POWER_TOLERANCE: f64 = 1e-13;

/// `½ ||E Y - M||²`.
pub fn nnls_objective<T: Real>(
    bank: &MelFilterbank<T>,
    y: &Array2<T>,
    mel: &MelSpectrogram<T>,
) -> Result<T> {
    Ok(half_norm_sqr(&bank.mel_residual(y, mel)?))
}

fn half_norm_sqr<T: Real>(a: &Array2<T>) -> T {
    norm_sqr(a) * T::lit(0.5)
}

/// Largest eigenvalue of `EᵀE` by power iteration, i.e. the Lipschitz
/// constant of the NNLS gradient.
pub fn gram_spectral_norm<T: Real>(bank: &MelFilterbank<T>) -> T {
    let n = bank.n_bins();
    let e = bank.weights();
    let mut v = ndarray::Array1::from_elem(n, T::one() / T::lit(n as f64).sqrt());
    let mut estimate = T::zero();
    for _ in 0..POWER_ITERATIONS {
        let w = e.t().dot(&e.dot(&v));
        let norm = w.dot(&w).sqrt();
        if norm == T::zero() {
            return T::zero();
        }
        v = w / norm;
        let converged = Float::abs(norm - estimate) <= T::lit(POWER_TOLERANCE) * norm;
        estimate = norm;
        if converged {
            break;
        }
    }
    estimate
}

/// Non-negative least-squares estimate of the full-band magnitude,
/// `min_{Y >= 0} ½ ||E Y - M||²`, by accelerated projected gradient with
/// step `1 / λ_max(EᵀE)` and momentum restart whenever the objective would
/// increase. Starts from `P_N(E† M)`.
pub fn nnls_full_magnitude<T: Real>(
    mel: &MelSpectrogram<T>,
    bank: &MelFilterbank<T>,
    iterations: usize,
) -> Result<MagnitudeSpectrogram<T>> {
    nnls_full_magnitude_traced(mel, bank, iterations).map(|(y, _)| y)
}

/// [`nnls_full_magnitude`] also returning the objective after each
/// iteration.
pub fn nnls_full_magnitude_traced<T: Real>(
    mel: &MelSpectrogram<T>,
    bank: &MelFilterbank<T>,
    iterations: usize,
) -> Result<(MagnitudeSpectrogram<T>, Vec<T>)> {
    let e = bank.weights();
    let m = mel.values();
    let lipschitz = gram_spectral_norm(bank);
    let mut y = project_nonneg(&bank.pinv_apply(mel)?).into_values();
    if lipschitz == T::zero() {
        return Ok((MagnitudeSpectrogram::from_raw(y), vec![]));
    }
    let step = T::one() / lipschitz;

    let mut ey = e.dot(&y);
    let mut objective = half_norm_sqr(&(&ey - m));
    let mut y_prev = y.clone();
    let mut ey_prev = ey.clone();
    let mut t = T::one();
    let mut history = Vec::with_capacity(iterations);

    let gradient_step = |from: &Array2<T>, e_from: &Array2<T>| -> (Array2<T>, Array2<T>, T) {
        let gradient = e.t().dot(&(e_from - m));
        let next = project_nonneg(&(from - &(gradient * step))).into_values();
        let e_next = e.dot(&next);
        let f = half_norm_sqr(&(&e_next - m));
        (next, e_next, f)
    };

    for _ in 0..iterations {
        let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) / T::lit(2.0);
        let momentum = (t - T::one()) / t_next;
        let v = &y + &((&y - &y_prev) * momentum);
        // E is linear, so E v follows from the cached products.
        let ev = &ey + &((&ey - &ey_prev) * momentum);
        let (mut next, mut e_next, mut f_next) = gradient_step(&v, &ev);
        let mut t_after = t_next;
        if f_next > objective {
            (next, e_next, f_next) = gradient_step(&y, &ey);
            t_after = T::one();
            if f_next > objective {
                // Only reachable through rounding in the Lipschitz estimate.
                next = y.clone();
                e_next = ey.clone();
                f_next = objective;
            }
        }
        y_prev = std::mem::replace(&mut y, next);
        ey_prev = std::mem::replace(&mut ey, e_next);
        objective = f_next;
        t = t_after;
        history.push(objective);
    }
    Ok((MagnitudeSpectrogram::from_raw(y), history))
}
