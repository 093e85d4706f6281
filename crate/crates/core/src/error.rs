use thiserror::Error;

use crate::potential::Model;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("invalid potential: {0}")]
    InvalidSpec(String),

    #[error("unknown potential model `{0}` (expected rect, scarf, rational_odd or exp_linear)")]
    UnknownModel(String),

    #[error("energy must be strictly positive, got {0}")]
    NonPositiveEnergy(f64),

    /// A closed-form denominator vanished (|d| < 1e-300).
    #[error("degenerate energy E = {energy}: {what} underflows")]
    DegenerateEnergy { energy: f64, what: &'static str },

    #[error("no closed form for model {0}; use the numeric backend")]
    NoClosedForm(Model),

    #[error("invalid numeric options: {0}")]
    InvalidOptions(String),

    #[error("integration needs {required} steps but max_steps is {max}")]
    StepBudgetExceeded { required: usize, max: usize },

    #[error("step {step} too large at E = {energy}: step-halving error estimate {estimate:e}")]
    StepTooLarge {
        energy: f64,
        step: f64,
        estimate: f64,
    },

    #[error("wavefunction overflow at E = {energy} over half-width {half_width}; try a larger truncation tolerance")]
    Overflow { energy: f64, half_width: f64 },

    #[error("reciprocity violated at E = {energy}: |T_left - T_right| = {residual:e}")]
    ReciprocityViolation { energy: f64, residual: f64 },

    #[error("need at least 3 wavefunction samples for Simpson quadrature, got {0}")]
    TooFewSamples(usize),

    #[error("invalid energy grid: {0}")]
    InvalidGrid(String),

    #[error("no critical crossing in V2 range [{low}, {high}]")]
    NoCrossing { low: f64, high: f64 },
}

impl ScatterError {
    /// Energy at which the failure happened, if it is tied to one.
    pub fn energy(&self) -> Option<f64> {
        match *self {
            ScatterError::NonPositiveEnergy(e) => Some(e),
            ScatterError::DegenerateEnergy { energy, .. }
            | ScatterError::StepTooLarge { energy, .. }
            | ScatterError::Overflow { energy, .. }
            | ScatterError::ReciprocityViolation { energy, .. } => Some(energy),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ScatterError>;
