use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Storage;

/// Step size of the phase (X) block. The closed-form X update
/// `P_C(P_Y(X))` assumes this value.
pub const TAU1: f64 = 0.5;

/// Inertia on the magnitude (Y) block; always zero.
pub const BETA: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Griffin-Lim against the pseudo-inverse magnitude `P_N(E† M)`.
    Gla,
    /// Fast Griffin-Lim against the pseudo-inverse magnitude.
    Fgla,
    /// Gradient descent on the waveform.
    Gd,
    /// iPALM with the mel-domain fidelity `||E Y - M||²`.
    PropMel,
    /// iPALM with the full-band distance-to-set fidelity `d_M(Y)²`.
    PropFull,
    /// NNLS full-band magnitude followed by Griffin-Lim.
    CascadeGla,
    /// NNLS full-band magnitude followed by fast Griffin-Lim.
    CascadeFgla,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Gla,
        Method::Fgla,
        Method::Gd,
        Method::PropMel,
        Method::PropFull,
        Method::CascadeGla,
        Method::CascadeFgla,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gla => "gla",
            Method::Fgla => "fgla",
            Method::Gd => "gd",
            Method::PropMel => "prop-mel",
            Method::PropFull => "prop-full",
            Method::CascadeGla => "cascade-gla",
            Method::CascadeFgla => "cascade-fgla",
        }
    }

    pub fn uses_lambda(self) -> bool {
        matches!(self, Method::PropMel | Method::PropFull)
    }

    pub fn uses_alpha(self) -> bool {
        matches!(
            self,
            Method::Fgla | Method::PropMel | Method::PropFull | Method::CascadeFgla
        )
    }

    pub fn uses_step_size(self) -> bool {
        self == Method::Gd
    }

    pub fn uses_nnls(self) -> bool {
        matches!(self, Method::CascadeGla | Method::CascadeFgla)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!(
                    "unknown method {s:?} (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Initial phase of `X⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitPhase {
    #[default]
    Zero,
    /// Independent uniform phases in `[0, 2π)` drawn from the configured seed.
    Random,
}

impl FromStr for InitPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(InitPhase::Zero),
            "random" => Ok(InitPhase::Random),
            _ => Err(Error::Config(format!(
                "unknown init {s:?} (expected zero or random)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Number of iterations `K`.
    pub iterations: usize,
    /// Weight of the mel fidelity term.
    pub lambda: f64,
    /// Inertia of the X block (ignored by `gla`, `gd`, `cascade-gla`).
    pub alpha: f64,
    pub init: InitPhase,
    pub seed: u64,
    /// Initial step of the waveform gradient descent; `None` derives it from
    /// the operator norms.
    pub step_size: Option<f64>,
    pub nnls_iterations: usize,
    /// Precision of the output signal and of the reference mel-spectrogram
    /// used for trace SCM values.
    pub storage: Storage,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::PropFull,
            iterations: 500,
            lambda: 10.0,
            alpha: 0.9,
            init: InitPhase::Zero,
            seed: 0,
            step_size: None,
            nnls_iterations: 1000,
            storage: Storage::Native,
        }
    }
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    /// Step size of the Y block, the partial Lipschitz constant `1 + λ`.
    pub fn tau2(&self) -> f64 {
        1.0 + self.lambda
    }

    /// Inertia actually applied by the selected method.
    pub fn effective_alpha(&self) -> f64 {
        if self.method.uses_alpha() {
            self.alpha
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in [0, 1), got {}",
                self.alpha
            )));
        }
        if let Some(mu) = self.step_size {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(Error::Config(format!(
                    "step size must be positive, got {mu}"
                )));
            }
        }
        if self.method.uses_nnls() && self.nnls_iterations == 0 {
            return Err(Error::Config("nnls iterations must be at least 1".into()));
        }
        Ok(())
    }
}
