use super::config::{Method, SolverConfig};
use super::gla::{fgla_step, gla_step, magnitude_loss};
use super::gradient::{default_step_size, gradient_descent_step, waveform_objective};
use super::ipalm::{
    ipalm_propfull_step, ipalm_propmel_step, propfull_objective, propmel_objective,
};
use super::nnls::nnls_full_magnitude;
use super::state::{init_state, init_state_with_magnitude, Problem, RunState};
use crate::error::{Error, Result};
use crate::io::TraceRow;
use crate::metrics::{scm_with_storage, FLOOR_DB};
use crate::scalar::Real;
use crate::signal::Signal;
use crate::spectrogram::MagnitudeSpectrogram;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    /// Reconstructed waveform, rounded to the configured storage precision.
    pub signal: Signal<T>,
    /// Row 0 describes the initial estimate, row `k` the estimate after
    /// iteration `k`.
    pub trace: Vec<TraceRow>,
    /// Gradient descent could not find a non-increasing step; the trace ends
    /// at the last accepted iterate.
    pub stalled: bool,
}

/// Runs `cfg.iterations` iterations of `cfg.method` and records the SCM of
/// the would-be output signal together with the method's objective after
/// every iteration.
pub fn run<T: Real>(problem: &Problem<'_, T>, cfg: &SolverConfig) -> Result<RunOutput<T>> {
    cfg.validate()?;
    let mut tracer = Tracer::new(problem, cfg);
    let lambda = T::lit(cfg.lambda);
    let alpha = T::lit(cfg.effective_alpha());

    let samples = match cfg.method {
        Method::Gd => return run_gradient_descent(problem, cfg, tracer),
        Method::Gla | Method::Fgla | Method::CascadeGla | Method::CascadeFgla => {
            let mut state = if cfg.method.uses_nnls() {
                let target = nnls_full_magnitude(problem.mel, problem.bank, cfg.nnls_iterations)?;
                init_state_with_magnitude(problem.stft, target, cfg)?
            } else {
                init_state(problem, cfg)?
            };
            let target: MagnitudeSpectrogram<T> = state.y.clone();
            let objective = |s: &RunState<T>| magnitude_loss(&s.x, &target);
            tracer.record_state(&state, objective(&state))?;
            for _ in 0..cfg.iterations {
                if matches!(cfg.method, Method::Gla | Method::CascadeGla) {
                    gla_step(&mut state, problem.stft, &target)?;
                } else {
                    fgla_step(&mut state, problem.stft, &target, alpha)?;
                }
                tracer.record_state(&state, objective(&state))?;
            }
            tracer.synthesize(&state)?
        }
        Method::PropFull | Method::PropMel => {
            let full = cfg.method == Method::PropFull;
            let objective = |s: &RunState<T>| {
                if full {
                    propfull_objective(&s.x, &s.y, problem, lambda)
                } else {
                    propmel_objective(&s.x, &s.y, problem, lambda)
                }
            };
            let mut state = init_state(problem, cfg)?;
            tracer.record_state(&state, objective(&state)?)?;
            for _ in 0..cfg.iterations {
                if full {
                    ipalm_propfull_step(&mut state, problem, lambda, alpha)?;
                } else {
                    ipalm_propmel_step(&mut state, problem, lambda, alpha)?;
                }
                tracer.record_state(&state, objective(&state)?)?;
            }
            tracer.synthesize(&state)?
        }
    };
    Ok(RunOutput {
        signal: Signal::new(samples, problem.bank.sample_rate())?,
        trace: tracer.rows,
        stalled: false,
    })
}

fn run_gradient_descent<T: Real>(
    problem: &Problem<'_, T>,
    cfg: &SolverConfig,
    mut tracer: Tracer<'_, '_, T>,
) -> Result<RunOutput<T>> {
    let state = init_state(problem, cfg)?;
    let mut x = tracer.synthesize(&state)?;
    let step = T::lit(cfg.step_size.unwrap_or_else(|| default_step_size(problem)));
    let objective = waveform_objective(&x, problem)?;
    tracer.record_signal(&x, objective)?;
    let mut stalled = false;
    for _ in 0..cfg.iterations {
        let descent = gradient_descent_step(&x, problem, step)?;
        if descent.stalled {
            stalled = true;
            break;
        }
        x = descent.signal;
        tracer.record_signal(&x, descent.objective)?;
    }
    cfg.storage.round_all(&mut x);
    Ok(RunOutput {
        signal: Signal::new(x, problem.bank.sample_rate())?,
        trace: tracer.rows,
        stalled,
    })
}

struct Tracer<'p, 'a, T: Real> {
    problem: &'p Problem<'a, T>,
    cfg: &'p SolverConfig,
    rows: Vec<TraceRow>,
}

impl<'p, 'a, T: Real> Tracer<'p, 'a, T> {
    fn new(problem: &'p Problem<'a, T>, cfg: &'p SolverConfig) -> Self {
        Self {
            problem,
            cfg,
            rows: Vec::with_capacity(cfg.iterations + 1),
        }
    }

    /// `G†(X)` rounded to storage precision.
    fn synthesize(&self, state: &RunState<T>) -> Result<Vec<T>> {
        let mut samples = self.problem.stft.istft(&state.x)?.samples;
        self.cfg.storage.round_all(&mut samples);
        Ok(samples)
    }

    fn record_state(&mut self, state: &RunState<T>, objective: T) -> Result<()> {
        let samples = self.synthesize(state)?;
        self.record_signal(&samples, objective)
    }

    fn record_signal(&mut self, samples: &[T], objective: T) -> Result<()> {
        let mut rounded;
        let samples = if self.cfg.storage == crate::scalar::Storage::Native {
            samples
        } else {
            rounded = samples.to_vec();
            self.cfg.storage.round_all(&mut rounded);
            &rounded[..]
        };
        let p = self.problem;
        let scm_db = match scm_with_storage(samples, p.mel, p.bank, p.stft, self.cfg.storage) {
            Ok(v) => v.as_f64(),
            // An all-zero target is matched exactly by silence and by
            // nothing else.
            Err(Error::EmptyReference) => {
                let predicted = p.bank.apply_mel(&p.stft.stft(samples)?.magnitude())?;
                if predicted.norm() == T::zero() {
                    FLOOR_DB
                } else {
                    f64::NAN
                }
            }
            Err(e) => return Err(e),
        };
        self.rows.push(TraceRow {
            iteration: self.rows.len(),
            scm_db,
            objective: objective.as_f64(),
        });
        Ok(())
    }
}
