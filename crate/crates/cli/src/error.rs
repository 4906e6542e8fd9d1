use cornerscale_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Schema(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Errors raised while turning the config into a model.
    pub fn schema(e: CoreError) -> Self {
        CliError::Schema(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

/// Errors raised during a computation. Parameter problems the config could
/// have avoided still count as schema errors.
impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_)
            | CoreError::ThetaOutsideRegion(_)
            | CoreError::BranchPoint { .. }
            | CoreError::OnBranchCut { .. }
            | CoreError::GridTooCoarse { .. }
            | CoreError::GridTooShort(_)
            | CoreError::SupportBeyondScalingRadius { .. }
            | CoreError::TooLarge { .. }
            | CoreError::Unsupported(_)
            | CoreError::Empty(_) => CliError::Schema(e.to_string()),
            CoreError::DivergentTail { .. }
            | CoreError::Singular(_)
            | CoreError::Backend(_)
            | CoreError::NoConvergence(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
