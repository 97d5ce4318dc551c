use thiserror::Error;

/// Which of the three per-step inequalities an audit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// `||F|| <= 1` and `F(f_{n-1}) >= (1 - delta) ||f_{n-1}|| - delta'`.
    Functional,
    /// `F(phi_n) >= t sup_g F(g) - t'`.
    Select,
    /// `||f - G_n|| <= (1 + eta) E_n + eta'`.
    Approx,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::Functional => "functional",
            Constraint::Select => "select",
            Constraint::Approx => "approx",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("element is zero")]
    ZeroElement,
    #[error("exponent {0} out of range (must be finite and > 1)")]
    ExponentOutOfRange(f64),
    #[error("coordinate {index} exceeds horizon {horizon}")]
    HorizonExceeded { index: usize, horizon: usize },
    #[error("coordinate {index} is outside the index domain of the space")]
    IndexOutOfDomain { index: usize },
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("solver did not converge after {iterations} iterations (certificate {certificate:e}, residual {residual:e})")]
    NonConvergence { iterations: usize, certificate: f64, residual: f64 },
    #[error("approximant breaks the error bound by {0:e}")]
    SlackViolated(f64),
    #[error("step {step}: {which} constraint violated (margin {margin:e})")]
    ConstraintViolation { step: usize, which: Constraint, margin: f64 },
    #[error("no admissible atom")]
    WeakSelectionImpossible,
    #[error("no root of rho(u) = {slope} u found below {limit:e}")]
    NoRoot { slope: f64, limit: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("witness certificate invalid: {0}")]
    WitnessInvalid(String),
    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),
    #[error("dictionary is empty")]
    EmptyDictionary,
}

pub type Result<T> = std::result::Result<T, Error>;
