//! Reconstruction methods: Griffin-Lim baselines, the cascaded NNLS
//! pipeline, waveform gradient descent, and the two iPALM variants that
//! estimate full-band magnitude and phase jointly.

mod config;
mod gla;
mod gradient;
mod ipalm;
mod nnls;
mod run;
mod state;

pub use config::{InitPhase, Method, SolverConfig, BETA, TAU1};
pub use gla::{fgla_step, gla_step, gla_step_projected_gradient, magnitude_loss};
pub use gradient::{
    default_step_size, gradient_descent_step, waveform_gradient, waveform_objective, DescentStep,
    MAX_HALVINGS,
};
pub use ipalm::{ipalm_propfull_step, ipalm_propmel_step, propfull_objective, propmel_objective};
pub use nnls::{
    gram_spectral_norm, nnls_full_magnitude, nnls_full_magnitude_traced, nnls_objective,
};
pub use run::{run, RunOutput};
pub use state::{init_state, init_state_with_magnitude, Problem, RunState};
