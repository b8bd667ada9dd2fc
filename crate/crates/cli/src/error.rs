use smld_core::Error as CoreError;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {target}: {source}")]
    Output {
        target: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Input problems the caller can fix map to the usage status, failures
    /// inside a computation to the numerical one.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Output { .. } => exit::NUMERICAL,
            CliError::Core(e) => match e {
                CoreError::NNotAboveBeta { .. }
                | CoreError::AlphaTooSmall { .. }
                | CoreError::GrowthTooFast { .. }
                | CoreError::InvalidParameter { .. }
                | CoreError::UnsupportedOrder { .. }
                | CoreError::Precondition { .. }
                | CoreError::Sampled(_) => exit::USAGE,
                CoreError::Domain { .. }
                | CoreError::NonConvergence { .. }
                | CoreError::KMaxExceeded { .. }
                | CoreError::Quadrature { .. }
                | CoreError::UnboundedCoefficients { .. }
                | CoreError::Degenerate(_) => exit::NUMERICAL,
            },
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "cli_reporting.usage",
            CliError::Output { .. } => "cli_reporting.output",
            CliError::Core(e) => e.code(),
        }
    }
}
