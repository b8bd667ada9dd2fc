use thiserror::Error;

/// Errors raised by the numerical layers.
///
/// Every variant maps to a stable, module-qualified code (see [`Error::code`])
/// so front ends can report failures without string matching.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} did not converge within {terms} terms")]
    NonConvergence { func: &'static str, terms: usize },

    #[error("requires n > beta (n = {n}, beta = {beta})")]
    NNotAboveBeta { n: f64, beta: f64 },

    #[error("requires alpha > -1 (alpha = {alpha})")]
    AlphaTooSmall { alpha: f64 },

    #[error("requires n > beta + A for integrability (n = {n}, beta = {beta}, A = {growth})")]
    GrowthTooFast { n: f64, beta: f64, growth: f64 },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("truncation needs k > k_max = {k_max}")]
    KMaxExceeded { k_max: usize },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("explicit formula only available for orders 1..=4, got {order}")]
    UnsupportedOrder { order: usize },

    #[error("precondition violated in {func}: {detail}")]
    Precondition { func: &'static str, detail: String },

    #[error("coefficient vector is not bounded: {detail}")]
    UnboundedCoefficients { detail: String },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("sampled function: {0}")]
    Sampled(String),
}

impl Error {
    /// Module-qualified identifier, e.g. `special_fn.domain`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "special_fn.domain",
            Error::NonConvergence { .. } => "special_fn.non_convergence",
            Error::NNotAboveBeta { .. } => "operator_core.n_not_above_beta",
            Error::AlphaTooSmall { .. } => "operator_core.alpha_too_small",
            Error::GrowthTooFast { .. } => "operator_core.growth_too_fast",
            Error::InvalidParameter { .. } => "operator_core.invalid_parameter",
            Error::KMaxExceeded { .. } => "operator_core.k_max_exceeded",
            Error::Quadrature { .. } => "operator_core.quadrature",
            Error::UnsupportedOrder { .. } => "moments.unsupported_order",
            Error::Precondition { .. } => "analysis_lab.precondition",
            Error::UnboundedCoefficients { .. } => "spectral.unbounded_coefficients",
            Error::Degenerate(_) => "analysis_lab.degenerate",
            Error::Sampled(_) => "operator_core.sampled_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
